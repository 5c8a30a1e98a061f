//! Graph morphisms as explicit node and edge maps.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::graph::{EdgeId, Graph, NodeId};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Morphism {
    pub nodes: BTreeMap<NodeId, NodeId>,
    pub edges: BTreeMap<EdgeId, EdgeId>,
}

impl Morphism {
    pub fn identity(g: &Graph) -> Morphism {
        Morphism {
            nodes: g.nodes().map(|v| (v, v)).collect(),
            edges: g.edges().map(|e| (e, e)).collect(),
        }
    }

    pub fn node(&self, v: NodeId) -> Option<NodeId> {
        self.nodes.get(&v).copied()
    }

    pub fn edge(&self, e: EdgeId) -> Option<EdgeId> {
        self.edges.get(&e).copied()
    }

    /// `other ∘ self`: first `self`, then `other`. Items whose image is not
    /// in the domain of `other` are dropped, so partial maps compose as
    /// partial maps.
    pub fn then(&self, other: &Morphism) -> Morphism {
        Morphism {
            nodes: self
                .nodes
                .iter()
                .filter_map(|(a, b)| other.nodes.get(b).map(|c| (*a, *c)))
                .collect(),
            edges: self
                .edges
                .iter()
                .filter_map(|(a, b)| other.edges.get(b).map(|c| (*a, *c)))
                .collect(),
        }
    }

    /// The inverse of an injective map.
    pub fn inverse(&self) -> Morphism {
        Morphism {
            nodes: self.nodes.iter().map(|(a, b)| (*b, *a)).collect(),
            edges: self.edges.iter().map(|(a, b)| (*b, *a)).collect(),
        }
    }

    pub fn node_image(&self) -> BTreeSet<NodeId> {
        self.nodes.values().copied().collect()
    }

    pub fn edge_image(&self) -> BTreeSet<EdgeId> {
        self.edges.values().copied().collect()
    }
}

/// Whether `m` is a total graph morphism `src → tgt`: sources, targets and
/// edge labels are preserved, node labels and rootedness wherever they are
/// defined in `src`.
pub fn is_morphism(m: &Morphism, src: &Graph, tgt: &Graph) -> bool {
    if m.nodes.len() != src.node_count() || m.edges.len() != src.edge_count() {
        return false;
    }
    for (v, n) in src.node_entries() {
        let Some(w) = m.node(v) else { return false };
        let Some(wn) = tgt.node(w) else { return false };
        if n.label.is_some() && n.label != wn.label {
            return false;
        }
        if n.root.is_some() && n.root != wn.root {
            return false;
        }
    }
    for (e, d) in src.edge_entries() {
        let Some(f) = m.edge(e) else { return false };
        let Some(fd) = tgt.edge(f) else { return false };
        if m.node(d.source) != Some(fd.source)
            || m.node(d.target) != Some(fd.target)
            || d.label != fd.label
        {
            return false;
        }
    }
    true
}

pub fn is_injective(m: &Morphism) -> bool {
    m.node_image().len() == m.nodes.len() && m.edge_image().len() == m.edges.len()
}

pub fn is_surjective(m: &Morphism, tgt: &Graph) -> bool {
    m.node_image().len() == tgt.node_count() && m.edge_image().len() == tgt.edge_count()
}

/// `h ⊆ g`: item sets included, incidence and edge labels equal, and the
/// partial labelling and rootedness of `h` contained in those of `g`.
pub fn is_subgraph(h: &Graph, g: &Graph) -> bool {
    h.node_entries().all(|(v, n)| match g.node(v) {
        Some(gn) => {
            (n.label.is_none() || n.label == gn.label) && (n.root.is_none() || n.root == gn.root)
        }
        None => false,
    }) && h.edge_entries().all(|(e, d)| g.edge(e) == Some(d))
}

/// All morphisms `src → tgt` (only the injective ones if asked), in
/// lexicographic order of node images then edge images.
pub fn enumerate_morphisms(src: &Graph, tgt: &Graph, injective_only: bool) -> Vec<Morphism> {
    let src_nodes: Vec<NodeId> = src.nodes().collect();
    let src_edges: Vec<EdgeId> = src.edges().collect();
    let mut out = Vec::new();
    let mut state = Enum {
        src,
        tgt,
        injective_only,
        src_nodes: &src_nodes,
        src_edges: &src_edges,
        nodes: BTreeMap::new(),
        edges: BTreeMap::new(),
        used_nodes: BTreeSet::new(),
        used_edges: BTreeSet::new(),
    };
    state.nodes_from(0, &mut out);
    out
}

struct Enum<'a> {
    src: &'a Graph,
    tgt: &'a Graph,
    injective_only: bool,
    src_nodes: &'a [NodeId],
    src_edges: &'a [EdgeId],
    nodes: BTreeMap<NodeId, NodeId>,
    edges: BTreeMap<EdgeId, EdgeId>,
    used_nodes: BTreeSet<NodeId>,
    used_edges: BTreeSet<EdgeId>,
}

impl Enum<'_> {
    fn nodes_from(&mut self, i: usize, out: &mut Vec<Morphism>) {
        if i == self.src_nodes.len() {
            return self.edges_from(0, out);
        }
        let v = self.src_nodes[i];
        let n = self.src.node(v).unwrap();
        for (w, wn) in self.tgt.node_entries() {
            if self.injective_only && self.used_nodes.contains(&w) {
                continue;
            }
            if (n.label.is_some() && n.label != wn.label) || (n.root.is_some() && n.root != wn.root)
            {
                continue;
            }
            self.nodes.insert(v, w);
            self.used_nodes.insert(w);
            self.nodes_from(i + 1, out);
            self.used_nodes.remove(&w);
            self.nodes.remove(&v);
        }
    }

    fn edges_from(&mut self, i: usize, out: &mut Vec<Morphism>) {
        if i == self.src_edges.len() {
            out.push(Morphism {
                nodes: self.nodes.clone(),
                edges: self.edges.clone(),
            });
            return;
        }
        let e = self.src_edges[i];
        let d = self.src.edge(e).unwrap();
        let s = self.nodes[&d.source];
        let t = self.nodes[&d.target];
        let candidates: Vec<EdgeId> = self
            .tgt
            .out_edges(s)
            .filter(|f| {
                let fd = self.tgt.edge(*f).unwrap();
                fd.target == t && fd.label == d.label
            })
            .collect();
        for f in candidates {
            if self.injective_only && self.used_edges.contains(&f) {
                continue;
            }
            self.edges.insert(e, f);
            self.used_edges.insert(f);
            self.edges_from(i + 1, out);
            self.used_edges.remove(&f);
            self.edges.remove(&e);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::Symbol;

    fn path(n: u32) -> Graph {
        let mut g = Graph::new();
        for i in 0..n {
            g.insert_node(NodeId(i), Some(Symbol::new("a")), Some(false))
                .unwrap();
        }
        for i in 1..n {
            g.add_edge(NodeId(i - 1), NodeId(i), Symbol::new("x")).unwrap();
        }
        g
    }

    #[test]
    fn identity_is_bijective_morphism() {
        let g = path(4);
        let id = Morphism::identity(&g);
        assert!(is_morphism(&id, &g, &g));
        assert!(is_injective(&id));
        assert!(is_surjective(&id, &g));
    }

    #[test]
    fn rooted_to_unrooted_is_not_a_morphism() {
        let mut g = Graph::new();
        g.insert_node(NodeId(0), None, Some(true)).unwrap();
        let mut h = Graph::new();
        h.insert_node(NodeId(0), None, Some(false)).unwrap();
        let m = Morphism {
            nodes: [(NodeId(0), NodeId(0))].into(),
            edges: BTreeMap::new(),
        };
        assert!(!is_morphism(&m, &g, &h));
        // undefined rootedness imposes nothing
        g.set_root(NodeId(0), None).unwrap();
        assert!(is_morphism(&m, &g, &h));
    }

    #[test]
    fn enumeration_agrees_with_is_morphism() {
        let g = path(2);
        let h = path(4);
        let all = enumerate_morphisms(&g, &h, false);
        assert_eq!(all.len(), 3);
        assert!(all.iter().all(|m| is_morphism(m, &g, &h)));
        let rev = enumerate_morphisms(&h, &g, false);
        assert!(rev.is_empty());
    }

    #[test]
    fn subgraph_checks() {
        let g = path(3);
        let mut h = Graph::new();
        h.insert_node(NodeId(1), Some(Symbol::new("a")), None).unwrap();
        assert!(is_subgraph(&h, &g));
        h.insert_node(NodeId(2), None, None).unwrap();
        h.insert_edge(EdgeId(7), NodeId(1), NodeId(2), Symbol::new("x"))
            .unwrap();
        assert!(!is_subgraph(&h, &g));
    }
}
