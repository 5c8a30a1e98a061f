//! The line-oriented text formats for graphs, rules and grammar manifests.
//!
//! ```text
//! graph g {
//!   node 1 label=box root=1   # omit label: unlabelled; omit root: undefined
//!   edge 1 1 -> 2 label=box
//! }
//! rule r { left { ... } interface { ... } right { ... } }
//! grammar { start=s.graph nonterminal-nodes=a,b nonterminal-edges= rules=r.rule }
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{EdgeId, Graph, GraphDescription, NodeId};
use crate::rule::Rule;
use crate::symbol::Symbol;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{}:{line}: {production}: {message}", file.as_deref().unwrap_or("<input>"))]
pub struct ParseError {
    pub file: Option<String>,
    pub line: usize,
    pub production: &'static str,
    pub message: String,
}

impl ParseError {
    pub fn in_file(mut self, file: impl Into<String>) -> Self {
        self.file = Some(file.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Open,
    Close,
    Eq,
    Arrow,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    last_line: usize,
}

fn lex(text: &str) -> Lexer {
    let mut toks = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let body = line.split('#').next().unwrap_or("");
        let mut word = String::new();
        let mut chars = body.chars().peekable();
        let flush = |word: &mut String, toks: &mut Vec<(Tok, usize)>| {
            if !word.is_empty() {
                toks.push((Tok::Word(std::mem::take(word)), line_no));
            }
        };
        while let Some(c) = chars.next() {
            match c {
                '{' | '}' | '=' => {
                    flush(&mut word, &mut toks);
                    toks.push((
                        match c {
                            '{' => Tok::Open,
                            '}' => Tok::Close,
                            _ => Tok::Eq,
                        },
                        line_no,
                    ));
                }
                '-' if chars.peek() == Some(&'>') => {
                    chars.next();
                    flush(&mut word, &mut toks);
                    toks.push((Tok::Arrow, line_no));
                }
                c if c.is_whitespace() => flush(&mut word, &mut toks),
                c => word.push(c),
            }
        }
        flush(&mut word, &mut toks);
    }
    let last_line = text.lines().count().max(1);
    Lexer {
        toks,
        pos: 0,
        last_line,
    }
}

impl Lexer {
    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .map_or(self.last_line, |(_, l)| *l)
    }

    fn err(&self, production: &'static str, message: impl Into<String>) -> ParseError {
        ParseError {
            file: None,
            line: self.line(),
            production,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, production: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            other => Err(self.err(
                production,
                format!("expected {}, found {}", show(Some(&want)), show(other)),
            )),
        }
    }

    fn word(&mut self, production: &'static str, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            other => Err(self.err(production, format!("expected {what}, found {}", show(other)))),
        }
    }

    fn keyword(&mut self, kw: &str, production: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) if w == kw => {
                self.pos += 1;
                Ok(())
            }
            other => Err(self.err(production, format!("expected `{kw}`, found {}", show(other)))),
        }
    }

    fn id(&mut self, production: &'static str) -> Result<u32, ParseError> {
        let line = self.line();
        let w = self.word(production, "an id")?;
        w.parse::<u32>().map_err(|_| ParseError {
            file: None,
            line,
            production,
            message: format!("expected a decimal id, found `{w}`"),
        })
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }
}

fn show(t: Option<&Tok>) -> String {
    match t {
        None => "end of input".into(),
        Some(Tok::Word(w)) => format!("`{w}`"),
        Some(Tok::Open) => "`{`".into(),
        Some(Tok::Close) => "`}`".into(),
        Some(Tok::Eq) => "`=`".into(),
        Some(Tok::Arrow) => "`->`".into(),
    }
}

const NODE: &str = "node <id> [label=<sym>] [root=0|1]";
const EDGE: &str = "edge <id> <src> -> <tgt> label=<sym>";
const GRAPH: &str = "graph <name> { ... }";
const RULE: &str = "rule <name> { left { ... } interface { ... } right { ... } }";
const GRAMMAR: &str = "grammar { start=<file> nonterminal-nodes=<syms> nonterminal-edges=<syms> rules=<files> }";

/// Parses `{ node ... edge ... }` including the braces.
fn graph_body(lx: &mut Lexer) -> Result<GraphDescription, ParseError> {
    lx.expect(Tok::Open, GRAPH)?;
    let mut d = GraphDescription::default();
    loop {
        match lx.peek() {
            Some(Tok::Close) => {
                lx.pos += 1;
                return Ok(d);
            }
            Some(Tok::Word(w)) if w == "node" => {
                lx.pos += 1;
                let id = NodeId(lx.id(NODE)?);
                let mut label = None;
                let mut root = None;
                while let Some(Tok::Word(w)) = lx.peek() {
                    let key = w.clone();
                    if key != "label" && key != "root" {
                        break;
                    }
                    lx.pos += 1;
                    lx.expect(Tok::Eq, NODE)?;
                    let line = lx.line();
                    let val = lx.word(NODE, "a value")?;
                    let dup = || ParseError {
                        file: None,
                        line,
                        production: NODE,
                        message: format!("`{key}` given twice"),
                    };
                    if key == "label" {
                        if label.is_some() {
                            return Err(dup());
                        }
                        label = Some(Symbol::from(val));
                    } else {
                        if root.is_some() {
                            return Err(dup());
                        }
                        root = Some(match val.as_str() {
                            "0" => false,
                            "1" => true,
                            _ => {
                                return Err(ParseError {
                                    file: None,
                                    line,
                                    production: NODE,
                                    message: format!("root must be 0 or 1, found `{val}`"),
                                })
                            }
                        });
                    }
                }
                d.nodes.push((id, label, root));
            }
            Some(Tok::Word(w)) if w == "edge" => {
                lx.pos += 1;
                let id = EdgeId(lx.id(EDGE)?);
                let s = NodeId(lx.id(EDGE)?);
                lx.expect(Tok::Arrow, EDGE)?;
                let t = NodeId(lx.id(EDGE)?);
                lx.keyword("label", EDGE)?;
                lx.expect(Tok::Eq, EDGE)?;
                let l = lx.word(EDGE, "a label")?;
                d.edges.push((id, s, t, Symbol::from(l)));
            }
            other => {
                return Err(lx.err(
                    GRAPH,
                    format!("expected `node`, `edge` or `}}`, found {}", show(other)),
                ))
            }
        }
    }
}

fn build(d: &GraphDescription, lx: &Lexer, production: &'static str) -> Result<Graph, ParseError> {
    d.build().map_err(|v| ParseError {
        file: None,
        line: lx.line().saturating_sub(0),
        production,
        message: v
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join("; "),
    })
}

/// Parses a graph file without checking well-formedness.
pub fn parse_graph_description(text: &str) -> Result<(String, GraphDescription), ParseError> {
    let mut lx = lex(text);
    lx.keyword("graph", GRAPH)?;
    let name = lx.word(GRAPH, "a graph name")?;
    let d = graph_body(&mut lx)?;
    if !lx.at_end() {
        return Err(lx.err(GRAPH, "trailing input after graph"));
    }
    Ok((name, d))
}

pub fn parse_graph(text: &str) -> Result<(String, Graph), ParseError> {
    let (name, d) = parse_graph_description(text)?;
    let lx = lex(text);
    let g = d.build().map_err(|v| ParseError {
        file: None,
        line: lx.last_line,
        production: GRAPH,
        message: v
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join("; "),
    })?;
    Ok((name, g))
}

/// Parses one or more rules.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>, ParseError> {
    let mut lx = lex(text);
    let mut out = Vec::new();
    while !lx.at_end() {
        lx.keyword("rule", RULE)?;
        let name = lx.word(RULE, "a rule name")?;
        lx.expect(Tok::Open, RULE)?;
        lx.keyword("left", RULE)?;
        let l = graph_body(&mut lx)?;
        let l = build(&l, &lx, RULE)?;
        lx.keyword("interface", RULE)?;
        let k = graph_body(&mut lx)?;
        let k = build(&k, &lx, RULE)?;
        lx.keyword("right", RULE)?;
        let r = graph_body(&mut lx)?;
        let r = build(&r, &lx, RULE)?;
        let line = lx.line();
        lx.expect(Tok::Close, RULE)?;
        let rule = Rule::new(name, l, k, r).map_err(|e| ParseError {
            file: None,
            line,
            production: RULE,
            message: e.to_string(),
        })?;
        out.push(rule);
    }
    if out.is_empty() {
        return Err(lx.err(RULE, "no rules in input"));
    }
    Ok(out)
}

pub fn parse_rule(text: &str) -> Result<Rule, ParseError> {
    let mut rules = parse_rules(text)?;
    if rules.len() != 1 {
        return Err(ParseError {
            file: None,
            line: 1,
            production: RULE,
            message: format!("expected exactly one rule, found {}", rules.len()),
        });
    }
    Ok(rules.pop().unwrap())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrammarManifest {
    pub start: String,
    pub nonterminal_nodes: Vec<Symbol>,
    pub nonterminal_edges: Vec<Symbol>,
    pub rules: Vec<String>,
}

pub fn parse_grammar_manifest(text: &str) -> Result<GrammarManifest, ParseError> {
    let mut lx = lex(text);
    lx.keyword("grammar", GRAMMAR)?;
    lx.expect(Tok::Open, GRAMMAR)?;
    let mut m = GrammarManifest::default();
    let mut have_start = false;
    loop {
        match lx.next() {
            Some(Tok::Close) => break,
            Some(Tok::Word(key)) => {
                lx.expect(Tok::Eq, GRAMMAR)?;
                // an empty list is written `key=` and followed by the next key
                let val = match (lx.peek(), lx.toks.get(lx.pos + 1).map(|t| &t.0)) {
                    (Some(Tok::Word(w)), Some(Tok::Eq)) if key != "start" => {
                        let _ = w;
                        String::new()
                    }
                    (Some(Tok::Word(w)), _) => {
                        let w = w.clone();
                        lx.pos += 1;
                        w
                    }
                    _ => String::new(),
                };
                let list = || -> Vec<String> {
                    val.split(',')
                        .filter(|s| !s.is_empty())
                        .map(str::to_string)
                        .collect()
                };
                match key.as_str() {
                    "start" => {
                        m.start = val.clone();
                        have_start = !val.is_empty();
                    }
                    "nonterminal-nodes" => {
                        m.nonterminal_nodes = list().into_iter().map(Symbol::from).collect()
                    }
                    "nonterminal-edges" => {
                        m.nonterminal_edges = list().into_iter().map(Symbol::from).collect()
                    }
                    "rules" => m.rules = list(),
                    _ => {
                        lx.pos -= 1;
                        return Err(lx.err(GRAMMAR, format!("unknown key `{key}`")));
                    }
                }
            }
            other => {
                lx.pos = lx.pos.saturating_sub(1);
                return Err(lx.err(GRAMMAR, format!("expected a key or `}}`, found {}", show(other.as_ref()))));
            }
        }
    }
    if !have_start {
        return Err(lx.err(GRAMMAR, "missing `start`"));
    }
    if !lx.at_end() {
        return Err(lx.err(GRAMMAR, "trailing input after manifest"));
    }
    Ok(m)
}

fn write_body(out: &mut String, g: &Graph, indent: &str) {
    for (v, n) in g.node_entries() {
        let _ = write!(out, "{indent}node {v}");
        if let Some(l) = &n.label {
            let _ = write!(out, " label={l}");
        }
        if let Some(r) = n.root {
            let _ = write!(out, " root={}", r as u8);
        }
        out.push('\n');
    }
    for (e, d) in g.edge_entries() {
        let _ = writeln!(
            out,
            "{indent}edge {e} {} -> {} label={}",
            d.source, d.target, d.label
        );
    }
}

/// Canonical text of a graph; parsing it yields the same ids.
pub fn print_graph(name: &str, g: &Graph) -> String {
    let mut out = format!("graph {name} {{\n");
    write_body(&mut out, g, "  ");
    out.push_str("}\n");
    out
}

pub fn print_rule(r: &Rule) -> String {
    let mut out = format!("rule {} {{\n", r.name);
    for (key, g) in [("left", &r.lhs), ("interface", &r.interface), ("right", &r.rhs)] {
        let _ = writeln!(out, "  {key} {{");
        write_body(&mut out, g, "    ");
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

pub fn print_rules(rules: &[Rule]) -> String {
    rules.iter().map(print_rule).collect::<Vec<_>>().join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: &str = "
        # a small graph
        graph g {
          node 1 label=box root=1
          node 2            # unlabelled, rootedness undefined
          edge 5 1->2 label=x
        }";

    #[test]
    fn parse_and_round_trip() {
        let (name, g) = parse_graph(G).unwrap();
        assert_eq!(name, "g");
        assert_eq!(g.label(NodeId(1)).map(Symbol::as_str), Some("box"));
        assert_eq!(g.root(NodeId(2)), None);
        assert_eq!(g.edge(EdgeId(5)).unwrap().target, NodeId(2));
        let text = print_graph(&name, &g);
        let (_, g2) = parse_graph(&text).unwrap();
        assert_eq!(g, g2);
        assert_eq!(print_graph("g", &g2), text);
    }

    #[test]
    fn errors_carry_line_and_production() {
        let e = parse_graph("graph g {\n node 1\n edge 1 1 => 2 label=x\n}").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.production.starts_with("edge"));
        let e = parse_graph("graph g {\n node 1 root=2\n}").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_graph("graph g {\n node 1\n edge 1 1 -> 9 label=x\n}").unwrap_err();
        assert!(e.message.contains("dangling target"));
    }

    #[test]
    fn rules_and_manifest() {
        let text = "rule r { left { node 1 label=a root=0 } interface { node 1 }
                    right { node 1 label=a root=0 node 2 label=a root=0 edge 1 1 -> 2 label=x } }";
        let r = parse_rule(text).unwrap();
        assert_eq!(r.created_nodes().count(), 1);
        let again = parse_rule(&print_rule(&r)).unwrap();
        assert_eq!(again, r);
        let bad = "rule r { left { node 1 label=a root=0 } interface { }
                   right { node 1 label=a root=0 } }";
        assert!(parse_rule(bad).unwrap_err().message.contains("not in the interface"));

        let m = parse_grammar_manifest(
            "grammar { start=s.graph nonterminal-nodes= nonterminal-edges=x,y rules=a.rule,b.rule }",
        )
        .unwrap();
        assert_eq!(m.start, "s.graph");
        assert!(m.nonterminal_nodes.is_empty());
        assert_eq!(m.nonterminal_edges.len(), 2);
        assert_eq!(m.rules, vec!["a.rule", "b.rule"]);
    }
}
