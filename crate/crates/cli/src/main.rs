use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rgt::bench::{parse_sizes, run_benchmark, run_benchmark_parallel, write_csv, GraphClass};
use rgt::builtin;
use rgt::confluence::{
    confluence_mod_garbage_report, critical_pairs, join_all, Conclusion, GarbagePredicate, Verdict,
};
use rgt::derivation::{derive, normal_forms, rule_steps, GtSystem, Strategy};
use rgt::encoding::{tree_encoder, Encoder};
use rgt::equivalence::{systems_equivalent, EquivalenceMode};
use rgt::format::{
    parse_grammar_manifest, parse_graph, parse_graph_description, parse_rules, print_graph,
    print_rules,
};
use rgt::grammar::{check_input_graph, plant_root, recognize_tree, Budget, Grammar, Membership};
use rgt::matching::{find_matches, satisfies_dangling};
use rgt::{Graph, LabelAlphabet, Morphism, Rule, Symbol};

#[derive(Parser)]
#[command(name = "rgt", version, about = "Rooted graph transformation toolkit")]
struct Cli {
    /// Emit one JSON record per line instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomised strategies.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for critical pair joining and parallel sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Search budget in direct derivations; each command has its own default.
    #[arg(long, global = true, env = "GT_BUDGET")]
    budget: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the matches of a rule's left-hand side in a graph.
    Match {
        #[arg(long)]
        rule: String,
        /// Pick one rule out of a multi-rule file.
        #[arg(long)]
        name: Option<String>,
        graph: PathBuf,
    },
    /// Apply a rule at one of its applicable matches.
    Apply {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        name: Option<String>,
        /// Index among the applicable matches.
        #[arg(long = "match", default_value_t = 0)]
        index: usize,
        graph: PathBuf,
    },
    /// Derive until a normal form or the step budget.
    Derive {
        #[arg(long)]
        rules: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::First)]
        strategy: StrategyArg,
        graph: PathBuf,
    },
    /// Every normal form reachable from a graph, up to isomorphism.
    NormalForms {
        #[arg(long)]
        rules: String,
        graph: PathBuf,
    },
    /// Membership of a graph in a grammar's language.
    Member {
        /// A grammar manifest, or builtin:tree / builtin:efd.
        #[arg(long)]
        grammar: String,
        graph: PathBuf,
    },
    /// Decide whether a graph is a tree with the tree recognition rules.
    RecognizeTree { graph: PathBuf },
    /// Critical pairs of a rule set and their joinability.
    CriticalPairs {
        #[arg(long)]
        rules: String,
        /// Use the inverse rules.
        #[arg(long)]
        invert: bool,
        /// Write overlap and both results of each pair not shown joinable.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Critical pair analysis modulo a garbage predicate.
    ConfluenceReport {
        #[arg(long)]
        rules: String,
        #[arg(long)]
        invert: bool,
        /// all, trees, acyclic, t-edge-cycle, rooted-trees or encoded-input-tree.
        #[arg(long, default_value = "all")]
        garbage: String,
    },
    /// Encode (or decode) a graph or rule file as a standard graph.
    Encode {
        input: String,
        #[arg(long, value_enum, default_value_t = Layout::Split)]
        layout: Layout,
        /// Split layout without root loops.
        #[arg(long)]
        unrooted: bool,
        #[arg(long)]
        decode: bool,
        /// Node labels of the original alphabet, for decoding.
        #[arg(long, value_delimiter = ',')]
        node_labels: Vec<String>,
    },
    /// Time tree recognition on generated graph classes.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "list,tree,grid,star")]
        class: Vec<GraphClass>,
        #[arg(long, default_value = "1000..100000")]
        sizes: String,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        /// CSV output file; the CSV goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Spread points over --jobs threads (timings become unreliable).
        #[arg(long)]
        parallel: bool,
    },
    /// Check a graph, rule or grammar file.
    Validate {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        node_labels: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        edge_labels: Vec<String>,
    },
    /// Compare two rule sets.
    Equivalent {
        left: String,
        right: String,
        /// iso, normalisation or stepwise(N).
        #[arg(long, default_value = "iso")]
        mode: EquivalenceMode,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    First,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layout {
    Split,
    Tree,
}

enum Outcome {
    Success,
    Negative,
    BudgetExceeded,
}

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

struct Out {
    json: bool,
    stdout: io::StdoutLock<'static>,
}

impl Out {
    fn text(&mut self, s: impl AsRef<str>) {
        if !self.json {
            let _ = writeln!(self.stdout, "{}", s.as_ref());
        }
    }

    fn record(&mut self, v: Value) {
        if self.json {
            let _ = writeln!(self.stdout, "{v}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Out {
        json: cli.json,
        stdout: io::stdout().lock(),
    };
    match run(&cli, &mut out) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Ok(Outcome::BudgetExceeded) => ExitCode::from(3),
        Err(Usage(msg)) => {
            if cli.json {
                out.record(json!({ "error": msg }));
            }
            eprintln!("rgt: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, Usage> {
    fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, Usage> {
    let text = read(path)?;
    parse_graph(&text)
        .map(|(_, g)| g)
        .map_err(|e| Usage(e.in_file(path.display().to_string()).to_string()))
}

fn load_rule_file(path: &Path) -> Result<Vec<Rule>, Usage> {
    let text = read(path)?;
    parse_rules(&text).map_err(|e| Usage(e.in_file(path.display().to_string()).to_string()))
}

/// A rule file, or one of the shipped systems as `builtin:<name>`.
fn load_system(spec: &str) -> Result<GtSystem, Usage> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return Ok(match name {
            "tree-recognition" => builtin::tree_recognition_system(),
            "tree-grammar" => builtin::tree_grammar().system,
            "encoded-tree" => builtin::encoded_tree_reference(),
            "encoded-tree-recognition" => tree_encoder().encode_system(&builtin::tree_recognition_system())?,
            "efd" => builtin::efd_grammar().system,
            "efd-inverse" => builtin::efd_reduction_system(),
            _ => {
                return Err(Usage(format!(
                    "unknown built-in system `{name}` (tree-recognition, tree-grammar, encoded-tree, \
                     encoded-tree-recognition, efd, efd-inverse)"
                )))
            }
        });
    }
    Ok(GtSystem::from_rules(load_rule_file(Path::new(spec))?))
}

fn pick_rule(system: GtSystem, name: Option<&str>) -> Result<Rule, Usage> {
    match name {
        Some(n) => system
            .rule(n)
            .cloned()
            .ok_or_else(|| Usage(format!("no rule named `{n}`"))),
        None if system.rules.len() == 1 => Ok(system.rules.into_iter().next().unwrap()),
        None => Err(Usage(format!(
            "{} rules in file; choose one with --name",
            system.rules.len()
        ))),
    }
}

fn load_grammar(spec: &str) -> Result<Grammar, Usage> {
    match spec {
        "builtin:tree" => return Ok(builtin::tree_grammar()),
        "builtin:efd" => return Ok(builtin::efd_grammar()),
        _ => {}
    }
    let path = Path::new(spec);
    let m = parse_grammar_manifest(&read(path)?)
        .map_err(|e| Usage(e.in_file(spec.to_string()).to_string()))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let start = load_graph(&dir.join(&m.start))?;
    let mut rules = Vec::new();
    for f in &m.rules {
        rules.extend(load_rule_file(&dir.join(f))?);
    }
    let alphabet = rules
        .iter()
        .fold(start.alphabet(), |a, r| a.union(&r.alphabet()))
        .with_nonterminals(m.nonterminal_nodes, m.nonterminal_edges);
    if !alphabet.is_well_formed() {
        return Err(Usage(format!("{spec}: non-terminals must be labels of the grammar")));
    }
    Ok(Grammar::new(GtSystem::new(alphabet, rules), start))
}

fn graph_json(g: &Graph) -> Value {
    json!({
        "nodes": g.node_entries().map(|(v, n)| json!({
            "id": v.0,
            "label": n.label.as_ref().map(Symbol::as_str),
            "root": n.root,
        })).collect::<Vec<_>>(),
        "edges": g.edge_entries().map(|(e, d)| json!({
            "id": e.0,
            "source": d.source.0,
            "target": d.target.0,
            "label": d.label.as_str(),
        })).collect::<Vec<_>>(),
    })
}

fn morphism_text(m: &Morphism) -> String {
    let nodes: Vec<String> = m.nodes.iter().map(|(a, b)| format!("{a}->{b}")).collect();
    let edges: Vec<String> = m.edges.iter().map(|(a, b)| format!("{a}->{b}")).collect();
    if edges.is_empty() {
        format!("nodes {}", nodes.join(" "))
    } else {
        format!("nodes {} edges {}", nodes.join(" "), edges.join(" "))
    }
}

fn morphism_json(m: &Morphism) -> Value {
    json!({
        "nodes": m.nodes.iter().map(|(a, b)| (a.0.to_string(), json!(b.0))).collect::<serde_json::Map<_, _>>(),
        "edges": m.edges.iter().map(|(a, b)| (a.0.to_string(), json!(b.0))).collect::<serde_json::Map<_, _>>(),
    })
}

fn verdict_outcome<'a>(verdicts: impl Iterator<Item = &'a Verdict>) -> Outcome {
    let mut unknown = false;
    for v in verdicts {
        match v {
            Verdict::No => return Outcome::Negative,
            Verdict::Unknown => unknown = true,
            Verdict::Yes => {}
        }
    }
    if unknown {
        Outcome::BudgetExceeded
    } else {
        Outcome::Success
    }
}

fn run(cli: &Cli, out: &mut Out) -> Result<Outcome, Usage> {
    let budget = |default: u64| cli.budget.unwrap_or(default);
    match &cli.cmd {
        Cmd::Match { rule, name, graph } => {
            let rule = pick_rule(load_system(rule)?, name.as_deref())?;
            let g = load_graph(graph)?;
            let ms = find_matches(&rule.lhs, &g);
            for (i, m) in ms.iter().enumerate() {
                let ok = satisfies_dangling(&rule, m, &g);
                out.text(format!(
                    "match {i}: {}{}",
                    morphism_text(m),
                    if ok { "" } else { " (dangling)" }
                ));
                out.record(json!({ "match": i, "morphism": morphism_json(m), "dangling_ok": ok }));
            }
            let applicable = ms.iter().filter(|m| satisfies_dangling(&rule, m, &g)).count();
            out.text(format!("{} matches", ms.len()));
            out.record(json!({ "rule": rule.name, "matches": ms.len(), "applicable": applicable }));
            Ok(Outcome::Success)
        }
        Cmd::Apply {
            rule,
            name,
            index,
            graph,
        } => {
            let rule = pick_rule(load_system(rule)?, name.as_deref())?;
            let g = load_graph(graph)?;
            let steps = rule_steps(&rule, &g);
            let Some(step) = steps.get(*index) else {
                out.text(format!("no applicable match {index} ({} applicable)", steps.len()));
                out.record(json!({ "rule": rule.name, "applied": false, "applicable": steps.len() }));
                return Ok(Outcome::Negative);
            };
            out.text(print_graph("result", &step.result));
            out.record(json!({
                "rule": rule.name,
                "applied": true,
                "match": morphism_json(&step.matching),
                "comatch": morphism_json(&step.comatch),
                "result": graph_json(&step.result),
            }));
            Ok(Outcome::Success)
        }
        Cmd::Derive {
            rules,
            strategy,
            graph,
        } => {
            let t = load_system(rules)?;
            let g = load_graph(graph)?;
            let strategy = match strategy {
                StrategyArg::First => Strategy::First,
                StrategyArg::Random => Strategy::Random(cli.seed),
            };
            let d = derive(&t, &g, strategy, budget(10_000) as usize);
            for (i, s) in d.steps.iter().enumerate() {
                out.text(format!("step {}: {} {}", i + 1, s.rule.name, morphism_text(&s.matching)));
                out.text(print_graph(&format!("step{}", i + 1), &s.result));
                out.record(json!({
                    "step": i + 1,
                    "rule": s.rule.name,
                    "match": morphism_json(&s.matching),
                    "result": graph_json(&s.result),
                }));
            }
            let status = if d.truncated { "truncated" } else { "normal form" };
            out.text(format!("{} steps, {status}", d.steps.len()));
            out.record(json!({ "steps": d.steps.len(), "truncated": d.truncated, "result": graph_json(&d.result) }));
            Ok(if d.truncated {
                Outcome::BudgetExceeded
            } else {
                Outcome::Success
            })
        }
        Cmd::NormalForms { rules, graph } => {
            let t = load_system(rules)?;
            let g = load_graph(graph)?;
            let nf = normal_forms(&t, &g, budget(10_000));
            for (i, h) in nf.forms.iter().enumerate() {
                out.text(print_graph(&format!("nf{i}"), h));
                out.record(json!({ "normal_form": i, "graph": graph_json(h) }));
            }
            out.text(format!(
                "{} normal forms{}",
                nf.forms.len(),
                if nf.truncated { " (budget exceeded)" } else { "" }
            ));
            out.record(json!({
                "normal_forms": nf.forms.len(),
                "truncated": nf.truncated,
                "derivations": nf.derivations,
                "visited": nf.visited,
            }));
            Ok(if nf.truncated {
                Outcome::BudgetExceeded
            } else {
                Outcome::Success
            })
        }
        Cmd::Member { grammar, graph } => {
            let gr = load_grammar(grammar)?;
            let g = load_graph(graph)?;
            let m = gr.member(&g, &Budget::new(budget(100_000)));
            let word = match m {
                Membership::Yes => "yes",
                Membership::No => "no",
                Membership::BudgetExceeded => "budget-exceeded",
            };
            out.text(word);
            out.record(json!({ "member": m }));
            Ok(match m {
                Membership::Yes => Outcome::Success,
                Membership::No => Outcome::Negative,
                Membership::BudgetExceeded => Outcome::BudgetExceeded,
            })
        }
        Cmd::RecognizeTree { graph } => {
            let g = load_graph(graph)?;
            // Unrooted graphs are rooted at their lowest node first.
            let input = if g.roots().is_empty() {
                match plant_root(&g) {
                    Some(p) => p,
                    None => {
                        out.text("not-a-tree");
                        out.record(json!({ "tree": false, "steps": 0 }));
                        return Ok(Outcome::Negative);
                    }
                }
            } else {
                check_input_graph(&g)?;
                g
            };
            let rec = recognize_tree(&input)?;
            out.text(if rec.is_tree { "tree" } else { "not-a-tree" });
            out.record(json!({ "tree": rec.is_tree, "steps": rec.steps, "trace": rec.trace }));
            Ok(if rec.is_tree {
                Outcome::Success
            } else {
                Outcome::Negative
            })
        }
        Cmd::CriticalPairs {
            rules,
            invert,
            out_dir,
        } => {
            let mut t = load_system(rules)?;
            if *invert {
                t = t.invert();
            }
            let pairs = critical_pairs(&t);
            let results = join_all(&pairs, &t, budget(200), cli.jobs);
            if let Some(dir) = out_dir {
                fs::create_dir_all(dir)?;
            }
            for (i, (cp, r)) in pairs.iter().zip(&results).enumerate() {
                let (a, b) = (&t.rules[cp.rule1].name, &t.rules[cp.rule2].name);
                out.text(format!(
                    "pair {i}: {a}/{b} overlap {} nodes {} edges, joinable {}, strongly joinable {}",
                    cp.overlap.node_count(),
                    cp.overlap.edge_count(),
                    r.joinable,
                    r.strongly_joinable
                ));
                out.record(json!({
                    "pair": i,
                    "rule1": a,
                    "rule2": b,
                    "overlap": graph_json(&cp.overlap),
                    "persistent": cp.persistent.iter().map(|v| v.0).collect::<Vec<_>>(),
                    "joinable": r.joinable.to_string(),
                    "strongly_joinable": r.strongly_joinable.to_string(),
                }));
                if let (Some(dir), false) = (out_dir, r.joinable == Verdict::Yes) {
                    for (suffix, g) in [
                        ("overlap", &cp.overlap),
                        ("left", &cp.step1.result),
                        ("right", &cp.step2.result),
                    ] {
                        let name = format!("pair{i}-{suffix}");
                        fs::write(dir.join(format!("{name}.graph")), print_graph(&name, g))?;
                    }
                }
            }
            let joinable = results.iter().filter(|r| r.joinable == Verdict::Yes).count();
            let strong = results
                .iter()
                .filter(|r| r.strongly_joinable == Verdict::Yes)
                .count();
            out.text(format!(
                "{} critical pairs, {joinable} joinable, {strong} strongly joinable",
                pairs.len()
            ));
            out.record(json!({ "critical_pairs": pairs.len(), "joinable": joinable, "strongly_joinable": strong }));
            Ok(verdict_outcome(results.iter().map(|r| &r.joinable)))
        }
        Cmd::ConfluenceReport {
            rules,
            invert,
            garbage,
        } => {
            let mut t = load_system(rules)?;
            if *invert {
                t = t.invert();
            }
            let d = GarbagePredicate::builtin(garbage).ok_or_else(|| {
                Usage(format!(
                    "unknown garbage predicate `{garbage}` ({})",
                    GarbagePredicate::BUILTIN.join(", ")
                ))
            })?;
            let opts = rgt::confluence::ReportOptions {
                budget: budget(200),
                jobs: cli.jobs,
                seed: cli.seed,
                ..Default::default()
            };
            let (report, _, _) = confluence_mod_garbage_report(&t, &d, opts);
            for p in &report.pairs {
                out.text(format!(
                    "pair {}: {}/{} {} nodes{}, joinable {}, strongly joinable {}",
                    p.index,
                    p.rule1,
                    p.rule2,
                    p.overlap_nodes,
                    if p.garbage { " garbage" } else { "" },
                    p.joinable,
                    p.strongly_joinable
                ));
            }
            for line in &report.justification {
                out.text(line);
            }
            out.text(format!("conclusion: {}", report.conclusion));
            out.record(serde_json::to_value(&report)?);
            Ok(if report.conclusion >= Conclusion::LocallyConfluentModuloGarbage {
                Outcome::Success
            } else if report.not_locally_confluent.is_some() {
                Outcome::Negative
            } else {
                verdict_outcome(
                    report
                        .pairs
                        .iter()
                        .filter(|p| !p.garbage)
                        .map(|p| &p.strongly_joinable),
                )
            })
        }
        Cmd::Encode {
            input,
            layout,
            unrooted,
            decode,
            node_labels,
        } => encode(out, input, *layout, !*unrooted, *decode, node_labels),
        Cmd::Bench {
            class,
            sizes,
            trials,
            out: csv,
            parallel,
        } => {
            let sizes = parse_sizes(sizes).map_err(Usage)?;
            let report = if *parallel {
                run_benchmark_parallel(class, &sizes, *trials, cli.jobs)
            } else {
                run_benchmark(class, &sizes, *trials)
            };
            match csv {
                Some(path) => {
                    let mut f = io::BufWriter::new(fs::File::create(path)?);
                    write_csv(&mut f, &report.records)?;
                    f.flush()?;
                }
                None if !cli.json => write_csv(&mut out.stdout, &report.records)?,
                None => {}
            }
            for s in &report.summaries {
                let fit = s.fit.map_or("no fit".to_string(), |f| {
                    format!("slope {:.3} (r2 {:.3})", f.slope, f.r_squared)
                });
                let msg = format!("{}: {fit}", s.class);
                if csv.is_some() {
                    out.text(msg);
                } else if !cli.json {
                    eprintln!("{msg}");
                }
            }
            out.record(serde_json::to_value(&report)?);
            Ok(Outcome::Success)
        }
        Cmd::Validate {
            file,
            node_labels,
            edge_labels,
        } => validate(out, file, node_labels, edge_labels),
        Cmd::Equivalent { left, right, mode } => {
            let (a, b) = (load_system(left)?, load_system(right)?);
            let r = systems_equivalent(&a, &b, *mode);
            out.text(r.to_string());
            if let Some(w) = &r.witness {
                out.text(print_graph("witness", w));
            }
            out.record(json!({
                "mode": mode.to_string(),
                "equivalent": r.equivalent,
                "bounded": r.bounded,
                "graphs_checked": r.graphs_checked,
                "witness": r.witness.as_ref().map(graph_json),
            }));
            Ok(if r.equivalent {
                Outcome::Success
            } else {
                Outcome::Negative
            })
        }
    }
}

fn first_word(text: &str) -> Option<&str> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .and_then(|l| l.split_whitespace().next())
}

fn encode(
    out: &mut Out,
    input: &str,
    layout: Layout,
    rooted: bool,
    decode: bool,
    node_labels: &[String],
) -> Result<Outcome, Usage> {
    let is_graph = !input.starts_with("builtin:") && first_word(&read(Path::new(input))?) == Some("graph");
    if is_graph {
        let g = load_graph(Path::new(input))?;
        let enc = match layout {
            Layout::Tree => tree_encoder(),
            Layout::Split if decode => {
                let edges: Vec<Symbol> = g
                    .edge_entries()
                    .map(|(_, d)| d.label.clone())
                    .filter(|l| !node_labels.iter().any(|n| n == l.as_str()))
                    .filter(|l| !rgt::encoding::RESERVED.contains(&l.as_str()))
                    .collect();
                Encoder::split(&LabelAlphabet::new(node_labels.iter().map(String::as_str), edges), rooted)?
            }
            Layout::Split => Encoder::split(&g.alphabet(), rooted)?,
        };
        let h = if decode { enc.decode_graph(&g)? } else { enc.encode_graph(&g)? };
        let name = if decode { "decoded" } else { "encoded" };
        out.text(print_graph(name, &h));
        out.record(json!({ name: graph_json(&h) }));
    } else {
        if decode {
            return Err(Usage("only graphs can be decoded".into()));
        }
        let t = load_system(input)?;
        let enc = match layout {
            Layout::Tree => tree_encoder(),
            Layout::Split => Encoder::split(&t.alphabet, rooted)?,
        };
        let e = enc.encode_system(&t)?;
        out.text(print_rules(&e.rules));
        out.record(json!({ "rules": print_rules(&e.rules) }));
    }
    Ok(Outcome::Success)
}

fn validate(out: &mut Out, file: &Path, node_labels: &[String], edge_labels: &[String]) -> Result<Outcome, Usage> {
    let text = read(file)?;
    let name = file.display().to_string();
    let alphabet = (!node_labels.is_empty() || !edge_labels.is_empty()).then(|| {
        LabelAlphabet::new(
            node_labels.iter().map(String::as_str),
            edge_labels.iter().map(String::as_str),
        )
    });
    let problems: Vec<String> = match first_word(&text) {
        Some("graph") => {
            let (_, d) = parse_graph_description(&text).map_err(|e| Usage(e.in_file(&*name).to_string()))?;
            d.violations(alphabet.as_ref()).iter().map(|v| v.to_string()).collect()
        }
        Some("rule") => {
            let rules = parse_rules(&text).map_err(|e| Usage(e.in_file(&*name).to_string()))?;
            match &alphabet {
                Some(a) => rules
                    .iter()
                    .filter(|r| !r.is_over(a))
                    .map(|r| format!("rule {} uses labels outside the alphabet", r.name))
                    .collect(),
                None => Vec::new(),
            }
        }
        Some("grammar") => {
            load_grammar(&name)?;
            Vec::new()
        }
        _ => return Err(Usage(format!("{name}: expected a graph, rule or grammar file"))),
    };
    for p in &problems {
        out.text(format!("{name}: {p}"));
    }
    if problems.is_empty() {
        out.text("ok");
    }
    out.record(json!({ "file": name, "ok": problems.is_empty(), "problems": problems }));
    Ok(if problems.is_empty() {
        Outcome::Success
    } else {
        Outcome::Negative
    })
}
