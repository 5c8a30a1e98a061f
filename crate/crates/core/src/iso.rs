//! Graph isomorphism: colour refinement followed by backtracking.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};
use std::ops::ControlFlow;

use crate::graph::{EdgeId, Graph, NodeId};
use crate::morphism::Morphism;
use crate::symbol::Symbol;

fn hash_of<T: Hash>(t: &T) -> u64 {
    let mut h = DefaultHasher::new();
    t.hash(&mut h);
    h.finish()
}

/// Stable node colours. Isomorphic graphs get equal colour multisets and
/// any isomorphism preserves colours.
pub fn refined_colours(g: &Graph) -> BTreeMap<NodeId, u64> {
    let mut colour: BTreeMap<NodeId, u64> = g
        .node_entries()
        .map(|(v, n)| {
            let mut loops: Vec<&Symbol> = g
                .out_edges(v)
                .map(|e| g.edge(e).unwrap())
                .filter(|d| d.target == v)
                .map(|d| &d.label)
                .collect();
            loops.sort();
            (
                v,
                hash_of(&(&n.label, n.root, g.indegree(v), g.outdegree(v), loops)),
            )
        })
        .collect();
    let mut classes = count_classes(&colour);
    for _ in 0..g.node_count() {
        let next: BTreeMap<NodeId, u64> = g
            .nodes()
            .map(|v| {
                let mut sig: Vec<(bool, &Symbol, u64)> = g
                    .out_edges(v)
                    .map(|e| {
                        let d = g.edge(e).unwrap();
                        (true, &d.label, colour[&d.target])
                    })
                    .chain(g.in_edges(v).map(|e| {
                        let d = g.edge(e).unwrap();
                        (false, &d.label, colour[&d.source])
                    }))
                    .collect();
                sig.sort();
                (v, hash_of(&(colour[&v], sig)))
            })
            .collect();
        let next_classes = count_classes(&next);
        colour = next;
        if next_classes == classes {
            break;
        }
        classes = next_classes;
    }
    colour
}

fn count_classes(c: &BTreeMap<NodeId, u64>) -> usize {
    let mut v: Vec<u64> = c.values().copied().collect();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// An isomorphism-invariant hash.
pub fn fingerprint(g: &Graph) -> u64 {
    let mut cs: Vec<u64> = refined_colours(g).into_values().collect();
    cs.sort_unstable();
    let mut labels: Vec<&Symbol> = g.edge_entries().map(|(_, d)| &d.label).collect();
    labels.sort();
    hash_of(&(g.node_count(), g.edge_count(), cs, labels))
}

pub fn find_isomorphism(g: &Graph, h: &Graph) -> Option<Morphism> {
    find_isomorphism_with(g, h, &[], &[])
}

pub fn are_isomorphic(g: &Graph, h: &Graph) -> bool {
    find_isomorphism(g, h).is_some()
}

/// An isomorphism that extends the given node and edge pairs.
pub fn find_isomorphism_with(
    g: &Graph,
    h: &Graph,
    fixed_nodes: &[(NodeId, NodeId)],
    fixed_edges: &[(EdgeId, EdgeId)],
) -> Option<Morphism> {
    let mut found = None;
    for_each_isomorphism(g, h, fixed_nodes, fixed_edges, |m| {
        found = Some(m.clone());
        ControlFlow::Break(())
    });
    found
}

/// Visits isomorphisms `g → h` extending the fixed pairs, one per node
/// bijection (parallel edges are paired in id order, so isomorphisms that
/// differ only on parallel edges are not all listed).
pub fn for_each_isomorphism(
    g: &Graph,
    h: &Graph,
    fixed_nodes: &[(NodeId, NodeId)],
    fixed_edges: &[(EdgeId, EdgeId)],
    mut visit: impl FnMut(&Morphism) -> ControlFlow<()>,
) {
    if g.node_count() != h.node_count() || g.edge_count() != h.edge_count() {
        return;
    }
    let cg = refined_colours(g);
    let ch = refined_colours(h);
    let mut sg: Vec<u64> = cg.values().copied().collect();
    let mut sh: Vec<u64> = ch.values().copied().collect();
    sg.sort_unstable();
    sh.sort_unstable();
    if sg != sh {
        return;
    }
    let mut s = Search::new(g, h, cg, ch);
    for &(a, b) in fixed_nodes {
        if !s.g_adj.contains_key(&a) || !s.h_adj.contains_key(&b) {
            return;
        }
        match s.map.get(&a) {
            Some(&x) if x != b => return,
            Some(_) => continue,
            None => {}
        }
        if s.inv.contains_key(&b) || !s.compatible(a, b) {
            return;
        }
        s.map.insert(a, b);
        s.inv.insert(b, a);
    }
    for &(e, f) in fixed_edges {
        let (Some(de), Some(df)) = (g.edge(e), h.edge(f)) else {
            return;
        };
        for (x, y) in [(de.source, df.source), (de.target, df.target)] {
            match s.map.get(&x) {
                Some(&z) if z != y => return,
                Some(_) => {}
                None => {
                    if s.inv.contains_key(&y) || !s.compatible(x, y) {
                        return;
                    }
                    s.map.insert(x, y);
                    s.inv.insert(y, x);
                }
            }
        }
    }
    let order = s.order();
    let _ = s.extend(&order, 0, fixed_edges, &mut visit);
}

type Adj = HashMap<NodeId, HashMap<NodeId, Vec<(bool, Symbol)>>>;

fn adjacency(g: &Graph) -> Adj {
    let mut adj: Adj = g.nodes().map(|v| (v, HashMap::new())).collect();
    for (_, d) in g.edge_entries() {
        adj.get_mut(&d.source)
            .unwrap()
            .entry(d.target)
            .or_default()
            .push((true, d.label.clone()));
        if d.source != d.target {
            adj.get_mut(&d.target)
                .unwrap()
                .entry(d.source)
                .or_default()
                .push((false, d.label.clone()));
        }
    }
    for m in adj.values_mut() {
        for l in m.values_mut() {
            l.sort();
        }
    }
    adj
}

struct Search<'a> {
    g: &'a Graph,
    h: &'a Graph,
    cg: BTreeMap<NodeId, u64>,
    by_colour: BTreeMap<u64, Vec<NodeId>>,
    g_adj: Adj,
    h_adj: Adj,
    map: BTreeMap<NodeId, NodeId>,
    inv: BTreeMap<NodeId, NodeId>,
}

impl<'a> Search<'a> {
    fn new(g: &'a Graph, h: &'a Graph, cg: BTreeMap<NodeId, u64>, ch: BTreeMap<NodeId, u64>) -> Self {
        let mut by_colour: BTreeMap<u64, Vec<NodeId>> = BTreeMap::new();
        for (v, c) in &ch {
            by_colour.entry(*c).or_default().push(*v);
        }
        Search {
            g,
            h,
            cg,
            by_colour,
            g_adj: adjacency(g),
            h_adj: adjacency(h),
            map: BTreeMap::new(),
            inv: BTreeMap::new(),
        }
    }

    /// Unassigned nodes, most-constrained first: prefer nodes adjacent to
    /// already ordered ones, then small colour classes, then low ids.
    fn order(&self) -> Vec<NodeId> {
        let mut placed: std::collections::BTreeSet<NodeId> = self.map.keys().copied().collect();
        let mut out = Vec::new();
        let rest: Vec<NodeId> = self.g.nodes().filter(|v| !placed.contains(v)).collect();
        let class_size = |v: &NodeId| self.by_colour[&self.cg[v]].len();
        for _ in 0..rest.len() {
            let next = rest
                .iter()
                .filter(|v| !placed.contains(v))
                .min_by_key(|v| {
                    let linked = self.g_adj[v].keys().filter(|w| placed.contains(w)).count();
                    (std::cmp::Reverse(linked.min(1)), class_size(v), **v)
                })
                .copied()
                .unwrap();
            placed.insert(next);
            out.push(next);
        }
        out
    }

    fn compatible(&self, v: NodeId, c: NodeId) -> bool {
        if self.cg.get(&v).map(|col| self.by_colour.get(col).is_some_and(|s| s.contains(&c)))
            != Some(true)
        {
            return false;
        }
        let gv = &self.g_adj[&v];
        let hc = &self.h_adj[&c];
        let empty = Vec::new();
        if gv.get(&v).unwrap_or(&empty) != hc.get(&c).unwrap_or(&empty) {
            return false;
        }
        for (w, labels) in gv {
            if *w == v {
                continue;
            }
            if let Some(fw) = self.map.get(w) {
                if hc.get(fw) != Some(labels) {
                    return false;
                }
            }
        }
        for (x, labels) in hc {
            if *x == c {
                continue;
            }
            if let Some(w) = self.inv.get(x) {
                if gv.get(w) != Some(labels) {
                    return false;
                }
            }
        }
        true
    }

    fn extend(
        &mut self,
        order: &[NodeId],
        i: usize,
        fixed_edges: &[(EdgeId, EdgeId)],
        visit: &mut impl FnMut(&Morphism) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if i == order.len() {
            if let Some(m) = self.edge_map(fixed_edges) {
                return visit(&m);
            }
            return ControlFlow::Continue(());
        }
        let v = order[i];
        let candidates = self.by_colour[&self.cg[&v]].clone();
        for c in candidates {
            if self.inv.contains_key(&c) || !self.compatible(v, c) {
                continue;
            }
            self.map.insert(v, c);
            self.inv.insert(c, v);
            let r = self.extend(order, i + 1, fixed_edges, visit);
            self.map.remove(&v);
            self.inv.remove(&c);
            r?;
        }
        ControlFlow::Continue(())
    }

    /// Pairs edges group by group (same endpoints and label), honouring the
    /// fixed pairs.
    fn edge_map(&self, fixed: &[(EdgeId, EdgeId)]) -> Option<Morphism> {
        let mut groups: BTreeMap<(NodeId, NodeId, &Symbol), Vec<EdgeId>> = BTreeMap::new();
        for (f, d) in self.h.edge_entries() {
            groups.entry((d.source, d.target, &d.label)).or_default().push(f);
        }
        let mut edges = BTreeMap::new();
        for &(e, f) in fixed {
            let d = self.g.edge(e)?;
            let key = (self.map[&d.source], self.map[&d.target], &d.label);
            let group = groups.get_mut(&key)?;
            let pos = group.iter().position(|x| *x == f)?;
            group.remove(pos);
            edges.insert(e, f);
        }
        for (e, d) in self.g.edge_entries() {
            if edges.contains_key(&e) {
                continue;
            }
            let key = (self.map[&d.source], self.map[&d.target], &d.label);
            let group = groups.get_mut(&key)?;
            if group.is_empty() {
                return None;
            }
            edges.insert(e, group.remove(0));
        }
        Some(Morphism {
            nodes: self.map.clone(),
            edges,
        })
    }
}

/// A set of graphs up to isomorphism, bucketed by fingerprint.
#[derive(Default, Clone)]
pub struct IsoSet {
    buckets: HashMap<u64, Vec<usize>>,
    items: Vec<Graph>,
}

impl IsoSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of an isomorphic member, if any.
    pub fn find(&self, g: &Graph) -> Option<usize> {
        self.find_with_fingerprint(g, fingerprint(g))
    }

    fn find_with_fingerprint(&self, g: &Graph, fp: u64) -> Option<usize> {
        self.buckets
            .get(&fp)?
            .iter()
            .copied()
            .find(|&i| are_isomorphic(g, &self.items[i]))
    }

    /// Inserts `g` unless an isomorphic graph is present. Returns the
    /// member's index and whether it was new.
    pub fn insert(&mut self, g: Graph) -> (usize, bool) {
        let fp = fingerprint(&g);
        if let Some(i) = self.find_with_fingerprint(&g, fp) {
            return (i, false);
        }
        let i = self.items.len();
        self.items.push(g);
        self.buckets.entry(fp).or_default().push(i);
        (i, true)
    }

    pub fn contains(&self, g: &Graph) -> bool {
        self.find(g).is_some()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, i: usize) -> &Graph {
        &self.items[i]
    }

    pub fn into_vec(self) -> Vec<Graph> {
        self.items
    }

    pub fn iter(&self) -> impl Iterator<Item = &Graph> {
        self.items.iter()
    }
}
