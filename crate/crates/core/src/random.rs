//! Seeded random graphs, rules and trees for testing.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::builtin::BOX;
use crate::graph::{EdgeId, Graph, NodeId};
use crate::rule::Rule;
use crate::symbol::{LabelAlphabet, Symbol};

/// Knobs for random rules and hosts.
#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub node_labels: Vec<Symbol>,
    pub edge_labels: Vec<Symbol>,
    pub max_side_nodes: usize,
    pub max_side_edges: usize,
    /// Probability that a node is a root.
    pub root_prob: f64,
    /// Probability that an interface node has its label (resp. rootedness)
    /// left undefined.
    pub clear_prob: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            node_labels: vec!["a".into(), "b".into()],
            edge_labels: vec!["x".into(), "y".into()],
            max_side_nodes: 4,
            max_side_edges: 4,
            root_prob: 0.25,
            clear_prob: 0.3,
        }
    }
}

impl RandomSpec {
    pub fn alphabet(&self) -> LabelAlphabet {
        LabelAlphabet::new(self.node_labels.clone(), self.edge_labels.clone())
    }

    /// No roots anywhere.
    pub fn unrooted(mut self) -> Self {
        self.root_prob = 0.0;
        self
    }
}

fn pick<R: Rng>(rng: &mut R, xs: &[Symbol]) -> Symbol {
    xs.choose(rng).expect("non-empty label set").clone()
}

fn random_node<R: Rng>(rng: &mut R, spec: &RandomSpec) -> (Option<Symbol>, Option<bool>) {
    (
        Some(pick(rng, &spec.node_labels)),
        Some(rng.gen_bool(spec.root_prob)),
    )
}

/// A random totally labelled and rooted graph.
pub fn random_tlrg<R: Rng>(rng: &mut R, spec: &RandomSpec, max_nodes: usize, max_edges: usize) -> Graph {
    let mut g = Graph::new();
    let n = rng.gen_range(0..=max_nodes);
    for _ in 0..n {
        let (l, r) = random_node(rng, spec);
        g.add_node(l, r);
    }
    if n > 0 {
        let m = rng.gen_range(0..=max_edges);
        for _ in 0..m {
            let s = NodeId(rng.gen_range(0..n as u32));
            let t = NodeId(rng.gen_range(0..n as u32));
            g.add_edge(s, t, pick(rng, &spec.edge_labels)).unwrap();
        }
    }
    g
}

/// A random rule with at most `spec.max_side_nodes` nodes per side.
/// Left-only items have ids below 100, right-only items ids from 100.
pub fn random_rule<R: Rng>(rng: &mut R, spec: &RandomSpec, name: &str) -> Rule {
    let l = random_tlrg(rng, spec, spec.max_side_nodes, spec.max_side_edges);
    let mut k = Graph::new();
    let mut r = Graph::new();
    for (v, n) in l.node_entries() {
        if rng.gen_bool(0.6) {
            let label = if rng.gen_bool(spec.clear_prob) { None } else { n.label.clone() };
            let root = if rng.gen_bool(spec.clear_prob) { None } else { n.root };
            k.insert_node(v, label.clone(), root).unwrap();
            let (fl, fr) = random_node(rng, spec);
            r.insert_node(v, label.or(fl), root.or(fr)).unwrap();
        }
    }
    for (e, d) in l.edge_entries() {
        if k.contains_node(d.source) && k.contains_node(d.target) && rng.gen_bool(0.6) {
            k.insert_edge(e, d.source, d.target, d.label.clone()).unwrap();
            r.insert_edge(e, d.source, d.target, d.label.clone()).unwrap();
        }
    }
    let room = spec.max_side_nodes.saturating_sub(k.node_count());
    let extra = rng.gen_range(0..=room);
    for i in 0..extra {
        let (fl, fr) = random_node(rng, spec);
        r.insert_node(NodeId(100 + i as u32), fl, fr).unwrap();
    }
    let nodes: Vec<NodeId> = r.nodes().collect();
    if !nodes.is_empty() {
        let room = spec.max_side_edges.saturating_sub(k.edge_count());
        for i in 0..rng.gen_range(0..=room) {
            let s = *nodes.choose(rng).unwrap();
            let t = *nodes.choose(rng).unwrap();
            r.insert_edge(EdgeId(100 + i as u32), s, t, pick(rng, &spec.edge_labels))
                .unwrap();
        }
    }
    Rule::new(name, l, k, r).expect("random rule is well formed")
}

/// A host containing a copy of the rule's left-hand side plus random
/// extra nodes and edges, so that a match usually exists.
pub fn random_host_for<R: Rng>(rng: &mut R, spec: &RandomSpec, rule: &Rule, max_nodes: usize) -> Graph {
    let mut g = Graph::new();
    let mut map = std::collections::BTreeMap::new();
    let mut order: Vec<NodeId> = rule.lhs.nodes().collect();
    order.shuffle(rng);
    for v in order {
        let n = rule.lhs.node(v).unwrap();
        map.insert(v, g.add_node(n.label.clone(), n.root));
    }
    let extra = max_nodes.saturating_sub(g.node_count());
    for _ in 0..rng.gen_range(0..=extra) {
        let (l, r) = random_node(rng, spec);
        g.add_node(l, r);
    }
    for (_, d) in rule.lhs.edge_entries() {
        g.add_edge(map[&d.source], map[&d.target], d.label.clone())
            .unwrap();
    }
    let n = g.node_count() as u32;
    if n > 0 {
        for _ in 0..rng.gen_range(0..=3) {
            let s = NodeId(rng.gen_range(0..n));
            let t = NodeId(rng.gen_range(0..n));
            g.add_edge(s, t, pick(rng, &spec.edge_labels)).unwrap();
        }
    }
    g
}

/// A random out-tree on `n` nodes with shuffled ids, all labels box and no
/// roots.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Graph {
    let b = Symbol::new(BOX);
    let mut ids: Vec<u32> = (0..n as u32).collect();
    ids.shuffle(rng);
    let mut g = Graph::new();
    for &i in &ids {
        g.insert_node(NodeId(i), Some(b.clone()), Some(false)).unwrap();
    }
    for k in 1..n {
        let parent = ids[rng.gen_range(0..k)];
        g.add_edge(NodeId(parent), NodeId(ids[k]), b.clone()).unwrap();
    }
    g
}

/// A random tree damaged by one structural change: an extra edge, a
/// removed edge, a reversed edge, a loop, or a parallel edge. The result
/// may or may not still be a tree.
pub fn random_perturbed_tree<R: Rng>(rng: &mut R, n: usize) -> Graph {
    let b = Symbol::new(BOX);
    let mut g = random_tree(rng, n);
    let nodes: Vec<NodeId> = g.nodes().collect();
    let edges: Vec<EdgeId> = g.edges().collect();
    match rng.gen_range(0..5) {
        0 => {
            let s = *nodes.choose(rng).unwrap();
            let t = *nodes.choose(rng).unwrap();
            g.add_edge(s, t, b).unwrap();
        }
        1 if !edges.is_empty() => {
            g.remove_edge(*edges.choose(rng).unwrap()).unwrap();
        }
        2 if !edges.is_empty() => {
            let d = g.remove_edge(*edges.choose(rng).unwrap()).unwrap();
            g.add_edge(d.target, d.source, b).unwrap();
        }
        3 => {
            let v = *nodes.choose(rng).unwrap();
            g.add_edge(v, v, b).unwrap();
        }
        _ if !edges.is_empty() => {
            let d = g.edge(*edges.choose(rng).unwrap()).unwrap().clone();
            g.add_edge(d.source, d.target, b).unwrap();
        }
        _ => {
            let v = nodes[0];
            g.add_edge(v, v, b).unwrap();
        }
    }
    g
}

/// A random all-box graph with no structure guarantees.
pub fn random_box_graph<R: Rng>(rng: &mut R, n: usize, m: usize) -> Graph {
    let b = Symbol::new(BOX);
    let mut ids: Vec<u32> = (0..n as u32).collect();
    ids.shuffle(rng);
    let mut g = Graph::new();
    for &i in &ids {
        g.insert_node(NodeId(i), Some(b.clone()), Some(false)).unwrap();
    }
    if n > 0 {
        for _ in 0..m {
            let s = NodeId(rng.gen_range(0..n as u32));
            let t = NodeId(rng.gen_range(0..n as u32));
            g.add_edge(s, t, b.clone()).unwrap();
        }
    }
    g
}
