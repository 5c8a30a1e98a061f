//! Encoding partially labelled, rooted graphs as totally labelled unrooted
//! ones: node labels and rootedness move onto self-loops, every node gets
//! a sentinel label.
//!
//! Two layouts are supported. `Split` puts the node label and the root
//! marker (`R` root, `N` non-root) on separate loops. `Fused` uses one loop
//! per node whose label is looked up from a table of `(label, root)`
//! pairs; the tree recognition rules use it with `R` = rooted box,
//! `N` = unrooted box, `M` = unrooted tri.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::builtin::{BOX, TRI};
use crate::derivation::GtSystem;
use crate::graph::{EdgeId, Graph, NodeId};
use crate::morphism::Morphism;
use crate::rule::{Rule, RuleError};
use crate::symbol::{LabelAlphabet, Symbol};

/// Loop ids live at and above this value; original edge ids must stay
/// below it.
pub const LOOP_BASE: u32 = 1 << 30;
const MAX_NODE: u32 = (u32::MAX - LOOP_BASE) / 4;

pub const ROOT_MARKER: &str = "R";
pub const NONROOT_MARKER: &str = "N";
pub const RESERVED: [&str; 3] = ["R", "N", "M"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("label `{0}` is reserved for root markers")]
    Reserved(Symbol),
    #[error("label `{0}` is used both for nodes and for edges")]
    Overlap(Symbol),
    #[error("sentinel `{0}` is already a label")]
    Sentinel(Symbol),
    #[error("edge id {0} is too large to encode")]
    EdgeId(EdgeId),
    #[error("node id {0} is too large to encode")]
    NodeId(NodeId),
    #[error("node {0} has no marker for its label and rootedness")]
    NoMarker(NodeId),
    #[error("edge label `{0}` has no encoding")]
    EdgeLabel(Symbol),
    #[error(transparent)]
    Rule(#[from] RuleError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("node {0} is not labelled with the sentinel")]
    NotSentinel(NodeId),
    #[error("node {0} carries more than one {1} loop")]
    Ambiguous(NodeId, &'static str),
    #[error("edge {0} has a label outside the encoding")]
    Unknown(EdgeId),
}

#[derive(Clone, Debug)]
enum Layout {
    Split { rooted: bool },
    Fused { table: BTreeMap<(Symbol, bool), Symbol> },
}

#[derive(Clone, Debug)]
pub struct Encoder {
    sentinel: Symbol,
    node_labels: BTreeSet<Symbol>,
    /// Original edge label to encoded edge label.
    edge_map: BTreeMap<Symbol, Symbol>,
    layout: Layout,
}

fn loop_id(v: NodeId, slot: u32, alt: u32) -> EdgeId {
    EdgeId(LOOP_BASE + 4 * v.0 + slot + 2 * alt)
}

impl Encoder {
    /// Label loops plus, when `rooted`, one `R`/`N` loop per node with
    /// defined rootedness. The sentinel is `□`.
    pub fn split(alphabet: &LabelAlphabet, rooted: bool) -> Result<Encoder, EncodeError> {
        Encoder::split_with_sentinel(alphabet, rooted, Symbol::new("□"))
    }

    pub fn split_with_sentinel(
        alphabet: &LabelAlphabet,
        rooted: bool,
        sentinel: Symbol,
    ) -> Result<Encoder, EncodeError> {
        for s in alphabet.node_labels.iter().chain(&alphabet.edge_labels) {
            if RESERVED.contains(&s.as_str()) {
                return Err(EncodeError::Reserved(s.clone()));
            }
            if *s == sentinel {
                return Err(EncodeError::Sentinel(s.clone()));
            }
        }
        if let Some(s) = alphabet.node_labels.intersection(&alphabet.edge_labels).next() {
            return Err(EncodeError::Overlap(s.clone()));
        }
        Ok(Encoder {
            sentinel,
            node_labels: alphabet.node_labels.clone(),
            edge_map: alphabet
                .edge_labels
                .iter()
                .map(|l| (l.clone(), l.clone()))
                .collect(),
            layout: Layout::Split { rooted },
        })
    }

    /// One loop per node, labelled by `table[(label, root)]`. Edge labels
    /// are renamed by `edge_map`.
    pub fn fused(
        sentinel: Symbol,
        table: impl IntoIterator<Item = ((Symbol, bool), Symbol)>,
        edge_map: impl IntoIterator<Item = (Symbol, Symbol)>,
    ) -> Result<Encoder, EncodeError> {
        let table: BTreeMap<_, _> = table.into_iter().collect();
        let edge_map: BTreeMap<_, _> = edge_map.into_iter().collect();
        let markers: BTreeSet<&Symbol> = table.values().collect();
        for l in edge_map.values() {
            if markers.contains(l) {
                return Err(EncodeError::Overlap(l.clone()));
            }
        }
        Ok(Encoder {
            sentinel,
            node_labels: table.keys().map(|(l, _)| l.clone()).collect(),
            edge_map,
            layout: Layout::Fused { table },
        })
    }

    pub fn sentinel(&self) -> &Symbol {
        &self.sentinel
    }

    pub fn is_rooted(&self) -> bool {
        match self.layout {
            Layout::Split { rooted } => rooted,
            Layout::Fused { .. } => true,
        }
    }

    /// `({sentinel}, encoded edge labels)`.
    pub fn alphabet(&self) -> LabelAlphabet {
        let mut edges: BTreeSet<Symbol> = self.edge_map.values().cloned().collect();
        match &self.layout {
            Layout::Split { rooted } => {
                edges.extend(self.node_labels.iter().cloned());
                if *rooted {
                    edges.insert(Symbol::new(ROOT_MARKER));
                    edges.insert(Symbol::new(NONROOT_MARKER));
                }
            }
            Layout::Fused { table } => edges.extend(table.values().cloned()),
        }
        LabelAlphabet::new([self.sentinel.clone()], edges)
    }

    fn edge_label(&self, l: &Symbol) -> Result<Symbol, EncodeError> {
        self.edge_map
            .get(l)
            .cloned()
            .ok_or_else(|| EncodeError::EdgeLabel(l.clone()))
    }

    /// The loops `(slot, label)` encoding one node's label and rootedness.
    fn loops(&self, v: NodeId, label: Option<&Symbol>, root: Option<bool>) -> Result<Vec<(u32, Symbol)>, EncodeError> {
        let mut out = Vec::new();
        match &self.layout {
            Layout::Split { rooted } => {
                if let Some(l) = label {
                    if !self.node_labels.contains(l) {
                        return Err(EncodeError::NoMarker(v));
                    }
                    out.push((0, l.clone()));
                }
                if let (true, Some(r)) = (*rooted, root) {
                    out.push((1, Symbol::new(if r { ROOT_MARKER } else { NONROOT_MARKER })));
                }
            }
            Layout::Fused { table } => match (label, root) {
                (None, None) => {}
                (Some(l), Some(r)) => {
                    let m = table.get(&(l.clone(), r)).ok_or(EncodeError::NoMarker(v))?;
                    out.push((0, m.clone()));
                }
                _ => return Err(EncodeError::NoMarker(v)),
            },
        }
        Ok(out)
    }

    fn check_ids(g: &Graph) -> Result<(), EncodeError> {
        if let Some(v) = g.nodes().next_back().filter(|v| v.0 >= MAX_NODE) {
            return Err(EncodeError::NodeId(v));
        }
        if let Some(e) = g.edges().next_back().filter(|e| e.0 >= LOOP_BASE) {
            return Err(EncodeError::EdgeId(e));
        }
        Ok(())
    }

    fn skeleton(&self, g: &Graph) -> Result<Graph, EncodeError> {
        Encoder::check_ids(g)?;
        let mut out = Graph::new();
        for v in g.nodes() {
            out.insert_node(v, Some(self.sentinel.clone()), Some(false))
                .unwrap();
        }
        for (e, d) in g.edge_entries() {
            out.insert_edge(e, d.source, d.target, self.edge_label(&d.label)?)
                .unwrap();
        }
        Ok(out)
    }

    pub fn encode_graph(&self, g: &Graph) -> Result<Graph, EncodeError> {
        let mut out = self.skeleton(g)?;
        for (v, n) in g.node_entries() {
            for (slot, l) in self.loops(v, n.label.as_ref(), n.root)? {
                out.insert_edge(loop_id(v, slot, 0), v, v, l).unwrap();
            }
        }
        Ok(out)
    }

    /// The encoding of `m: src → tgt`: the same node map, each original
    /// edge to its image, and each loop of `v` to the matching loop of
    /// `m(v)`.
    pub fn encode_morphism(&self, m: &Morphism, src: &Graph) -> Result<Morphism, EncodeError> {
        let mut out = m.clone();
        for (v, n) in src.node_entries() {
            let Some(w) = m.node(v) else { continue };
            for (slot, _) in self.loops(v, n.label.as_ref(), n.root)? {
                out.edges.insert(loop_id(v, slot, 0), loop_id(w, slot, 0));
            }
        }
        Ok(out)
    }

    fn is_marker(&self, l: &Symbol) -> Option<&'static str> {
        match &self.layout {
            Layout::Split { rooted } => {
                if self.node_labels.contains(l) {
                    Some("label")
                } else if *rooted && (l.as_str() == ROOT_MARKER || l.as_str() == NONROOT_MARKER) {
                    Some("root")
                } else {
                    None
                }
            }
            Layout::Fused { table } => table.values().any(|m| m == l).then_some("marker"),
        }
    }

    /// Inverts [`Encoder::encode_graph`]. Marker loops are recognised by
    /// label; every other edge keeps its id.
    pub fn decode_graph(&self, g: &Graph) -> Result<Graph, DecodeError> {
        let back: BTreeMap<&Symbol, &Symbol> = self.edge_map.iter().map(|(a, b)| (b, a)).collect();
        let mut attrs: BTreeMap<NodeId, (Option<Symbol>, Option<bool>)> = BTreeMap::new();
        for (v, n) in g.node_entries() {
            if n.label.as_ref() != Some(&self.sentinel) {
                return Err(DecodeError::NotSentinel(v));
            }
            attrs.insert(v, (None, None));
        }
        let mut out_edges = Vec::new();
        for (e, d) in g.edge_entries() {
            let kind = if d.source == d.target { self.is_marker(&d.label) } else { None };
            let v = d.source;
            let slot = attrs.get_mut(&v).unwrap();
            match (kind, &self.layout) {
                (Some("label"), _) => {
                    if slot.0.replace(d.label.clone()).is_some() {
                        return Err(DecodeError::Ambiguous(v, "label"));
                    }
                }
                (Some("root"), _) => {
                    if slot.1.replace(d.label.as_str() == ROOT_MARKER).is_some() {
                        return Err(DecodeError::Ambiguous(v, "root"));
                    }
                }
                (Some(_), Layout::Fused { table }) => {
                    if slot.0.is_some() {
                        return Err(DecodeError::Ambiguous(v, "marker"));
                    }
                    let ((l, r), _) = table.iter().find(|(_, m)| **m == d.label).unwrap();
                    *slot = (Some(l.clone()), Some(*r));
                }
                _ => {
                    let l = back.get(&d.label).ok_or(DecodeError::Unknown(e))?;
                    out_edges.push((e, d.source, d.target, (*l).clone()));
                }
            }
        }
        let mut out = Graph::new();
        for (v, (l, r)) in attrs {
            out.insert_node(v, l, r).unwrap();
        }
        for (e, s, t, l) in out_edges {
            out.insert_edge(e, s, t, l).unwrap();
        }
        Ok(out)
    }

    /// Restricts an encoded morphism to the edges that survive decoding
    /// of its source.
    pub fn decode_morphism(&self, m: &Morphism, src: &Graph) -> Result<Morphism, DecodeError> {
        let decoded = self.decode_graph(src)?;
        Ok(Morphism {
            nodes: m.nodes.clone(),
            edges: m
                .edges
                .iter()
                .filter(|(e, _)| decoded.contains_edge(**e))
                .map(|(a, b)| (*a, *b))
                .collect(),
        })
    }

    /// Encodes each side. Interface nodes keep their loops where the
    /// interface fixes what they encode; otherwise the left loop is
    /// deleted and a fresh right loop added.
    pub fn encode_rule(&self, r: &Rule) -> Result<Rule, EncodeError> {
        let mut l = self.skeleton(&r.lhs)?;
        let mut k = self.skeleton(&r.interface)?;
        let mut rr = self.skeleton(&r.rhs)?;
        for (v, n) in r.lhs.node_entries() {
            let kept = r.interface.node(v).map(|kn| (kn.label.is_some(), kn.root.is_some()));
            for (slot, lab) in self.loops(v, n.label.as_ref(), n.root)? {
                l.insert_edge(loop_id(v, slot, 0), v, v, lab.clone()).unwrap();
                let shared = match (kept, &self.layout) {
                    (Some((lk, _)), Layout::Split { .. }) if slot == 0 => lk,
                    (Some((_, rk)), Layout::Split { .. }) => rk,
                    (Some((lk, rk)), Layout::Fused { .. }) => lk && rk,
                    (None, _) => false,
                };
                if shared {
                    k.insert_edge(loop_id(v, slot, 0), v, v, lab.clone()).unwrap();
                    rr.insert_edge(loop_id(v, slot, 0), v, v, lab).unwrap();
                }
            }
        }
        for (v, n) in r.rhs.node_entries() {
            for (slot, lab) in self.loops(v, n.label.as_ref(), n.root)? {
                let alt = u32::from(r.interface.contains_node(v));
                if alt == 1 && rr.contains_edge(loop_id(v, slot, 0)) {
                    continue;
                }
                rr.insert_edge(loop_id(v, slot, alt), v, v, lab).unwrap();
            }
        }
        Ok(Rule::new(r.name.clone(), l, k, rr)?)
    }

    pub fn encode_system(&self, t: &GtSystem) -> Result<GtSystem, EncodeError> {
        let rules = t.rules.iter().map(|r| self.encode_rule(r)).collect::<Result<_, _>>()?;
        Ok(GtSystem::new(self.alphabet(), rules))
    }
}

/// The fused encoder for the tree recognition rules: sentinel box, edges
/// renamed box to tri, markers `R` (rooted box), `N` (unrooted box) and
/// `M` (unrooted tri).
pub fn tree_encoder() -> Encoder {
    let s = Symbol::new;
    Encoder::fused(
        s(BOX),
        [
            ((s(BOX), true), s("R")),
            ((s(BOX), false), s("N")),
            ((s(TRI), false), s("M")),
        ],
        [(s(BOX), s(TRI))],
    )
    .expect("tree markers are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{encoded_tree_reference, tree_recognition_system};
    use crate::derivation::rule_steps;
    use crate::iso::{are_isomorphic, IsoSet};
    use crate::morphism::{enumerate_morphisms, is_morphism};
    use crate::rule::rules_isomorphic;

    fn sym(s: &str) -> Symbol {
        Symbol::new(s)
    }

    fn example() -> Graph {
        let mut g = Graph::new();
        g.insert_node(NodeId(1), Some(sym("x")), None).unwrap();
        g.insert_node(NodeId(2), Some(sym("x")), None).unwrap();
        g.insert_node(NodeId(3), None, None).unwrap();
        g.insert_edge(EdgeId(1), NodeId(1), NodeId(3), sym("y")).unwrap();
        g.insert_edge(EdgeId(2), NodeId(2), NodeId(2), sym("z")).unwrap();
        g
    }

    #[test]
    fn partially_labelled_example() {
        let enc = Encoder::split(&LabelAlphabet::new(["x"], ["y", "z"]), false).unwrap();
        let e = enc.encode_graph(&example()).unwrap();
        assert_eq!((e.node_count(), e.edge_count()), (3, 4));
        let loops = |v: u32, l: &str| {
            e.out_edges(NodeId(v))
                .filter(|f| {
                    let d = e.edge(*f).unwrap();
                    d.target == NodeId(v) && d.label.as_str() == l
                })
                .count()
        };
        assert_eq!((loops(1, "x"), loops(2, "x"), loops(2, "z")), (1, 1, 1));
        assert_eq!(e.degree(NodeId(3)), 1);
        assert!(e.is_totally_labelled());
        assert_eq!(enc.decode_graph(&e).unwrap(), example());
        assert!(enc.encode_graph(&Graph::new()).unwrap().is_empty());
    }

    #[test]
    fn decode_rejects_outside_range() {
        let enc = Encoder::split(&LabelAlphabet::new(["x"], ["y", "z"]), false).unwrap();
        let mut e = enc.encode_graph(&example()).unwrap();
        e.add_edge(NodeId(1), NodeId(1), sym("x")).unwrap();
        assert_eq!(enc.decode_graph(&e), Err(DecodeError::Ambiguous(NodeId(1), "label")));
    }

    #[test]
    fn reserved_and_overlapping_labels_are_rejected() {
        assert!(Encoder::split(&LabelAlphabet::new(["R"], ["y"]), true).is_err());
        assert!(Encoder::split(&LabelAlphabet::new(["a"], ["a"]), true).is_err());
    }

    #[test]
    fn tree_rules_encode_as_drawn() {
        let enc = tree_encoder();
        let ours = enc.encode_system(&tree_recognition_system()).unwrap();
        let drawn = encoded_tree_reference();
        for (a, b) in ours.rules.iter().zip(&drawn.rules) {
            assert!(rules_isomorphic(a, b), "{}", a.name);
        }
    }

    #[test]
    fn morphisms_are_encoded_functorially() {
        let enc = Encoder::split(&LabelAlphabet::new(["x"], ["y", "z"]), false).unwrap();
        let g = example();
        let eg = enc.encode_graph(&g).unwrap();
        let id = Morphism::identity(&g);
        assert_eq!(enc.encode_morphism(&id, &g).unwrap(), Morphism::identity(&eg));
        let ms = enumerate_morphisms(&g, &g, false);
        for a in &ms {
            let ea = enc.encode_morphism(a, &g).unwrap();
            assert!(is_morphism(&ea, &eg, &eg));
            for b in &ms {
                let eb = enc.encode_morphism(b, &g).unwrap();
                assert_eq!(enc.encode_morphism(&a.then(b), &g).unwrap(), ea.then(&eb));
            }
        }
    }

    #[test]
    fn tree_simulation_on_small_input() {
        let enc = tree_encoder();
        let sys = tree_recognition_system();
        let esys = enc.encode_system(&sys).unwrap();
        let mut g = Graph::new();
        for i in 0..4 {
            g.add_node(Some(sym(BOX)), Some(i == 0));
        }
        for (s, t) in [(0, 1), (0, 2), (2, 3)] {
            g.add_edge(NodeId(s), NodeId(t), sym(BOX)).unwrap();
        }
        let mut want = IsoSet::new();
        for r in &sys.rules {
            for st in rule_steps(r, &g) {
                want.insert(st.result);
            }
        }
        let eg = enc.encode_graph(&g).unwrap();
        let mut got = IsoSet::new();
        for r in &esys.rules {
            for st in rule_steps(r, &eg) {
                got.insert(enc.decode_graph(&st.result).unwrap());
            }
        }
        assert_eq!(want.len(), got.len());
        assert!(want.iter().all(|h| got.contains(h)));
        assert!(are_isomorphic(&enc.decode_graph(&eg).unwrap(), &g));
    }
}
