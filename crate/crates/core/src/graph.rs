//! Concrete graphs with partial node labelling and partial rootedness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::symbol::{LabelAlphabet, Symbol};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EdgeId(pub u32);

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {0} already exists")]
    DuplicateNode(NodeId),
    #[error("edge {0} already exists")]
    DuplicateEdge(EdgeId),
    #[error("no node {0}")]
    MissingNode(NodeId),
    #[error("no edge {0}")]
    MissingEdge(EdgeId),
    #[error("node {0} still has incident edges")]
    NodeHasEdges(NodeId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeData {
    pub label: Option<Symbol>,
    pub root: Option<bool>,
    out_edges: BTreeSet<EdgeId>,
    in_edges: BTreeSet<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeData {
    pub source: NodeId,
    pub target: NodeId,
    pub label: Symbol,
}

/// A finite directed multigraph. Edge labels are total; node labels and
/// rootedness are partial (`None` means undefined, which is distinct from
/// any label and from "not a root").
///
/// The graph keeps the indexes matching relies on: nodes by label, the set
/// of root nodes, and per-node in/out adjacency.
#[derive(Clone, Default)]
pub struct Graph {
    nodes: BTreeMap<NodeId, NodeData>,
    edges: BTreeMap<EdgeId, EdgeData>,
    roots: BTreeSet<NodeId>,
    by_label: BTreeMap<Symbol, BTreeSet<NodeId>>,
    next_node: u32,
    next_edge: u32,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::format::print_graph("g", self))
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    // ----- construction -------------------------------------------------

    /// Adds a node with a fresh id taken from the monotone node counter.
    pub fn add_node(&mut self, label: Option<Symbol>, root: Option<bool>) -> NodeId {
        let id = NodeId(self.next_node);
        self.insert_node(id, label, root)
            .expect("fresh node id is unused");
        id
    }

    pub fn insert_node(
        &mut self,
        id: NodeId,
        label: Option<Symbol>,
        root: Option<bool>,
    ) -> Result<(), GraphError> {
        if self.nodes.contains_key(&id) {
            return Err(GraphError::DuplicateNode(id));
        }
        if let Some(l) = &label {
            self.by_label.entry(l.clone()).or_default().insert(id);
        }
        if root == Some(true) {
            self.roots.insert(id);
        }
        self.nodes.insert(
            id,
            NodeData {
                label,
                root,
                out_edges: BTreeSet::new(),
                in_edges: BTreeSet::new(),
            },
        );
        self.next_node = self.next_node.max(id.0 + 1);
        Ok(())
    }

    pub fn add_edge(
        &mut self,
        source: NodeId,
        target: NodeId,
        label: Symbol,
    ) -> Result<EdgeId, GraphError> {
        let id = EdgeId(self.next_edge);
        self.insert_edge(id, source, target, label)?;
        Ok(id)
    }

    pub fn insert_edge(
        &mut self,
        id: EdgeId,
        source: NodeId,
        target: NodeId,
        label: Symbol,
    ) -> Result<(), GraphError> {
        if self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateEdge(id));
        }
        if !self.nodes.contains_key(&source) {
            return Err(GraphError::MissingNode(source));
        }
        if !self.nodes.contains_key(&target) {
            return Err(GraphError::MissingNode(target));
        }
        self.nodes.get_mut(&source).unwrap().out_edges.insert(id);
        self.nodes.get_mut(&target).unwrap().in_edges.insert(id);
        self.edges.insert(
            id,
            EdgeData {
                source,
                target,
                label,
            },
        );
        self.next_edge = self.next_edge.max(id.0 + 1);
        Ok(())
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Result<EdgeData, GraphError> {
        let data = self.edges.remove(&id).ok_or(GraphError::MissingEdge(id))?;
        self.nodes.get_mut(&data.source).unwrap().out_edges.remove(&id);
        self.nodes.get_mut(&data.target).unwrap().in_edges.remove(&id);
        Ok(data)
    }

    /// Removes an isolated node.
    pub fn remove_node(&mut self, id: NodeId) -> Result<NodeData, GraphError> {
        let data = self.nodes.get(&id).ok_or(GraphError::MissingNode(id))?;
        if !data.out_edges.is_empty() || !data.in_edges.is_empty() {
            return Err(GraphError::NodeHasEdges(id));
        }
        let data = self.nodes.remove(&id).unwrap();
        self.unindex_label(id, data.label.as_ref());
        self.roots.remove(&id);
        Ok(data)
    }

    pub fn set_label(&mut self, id: NodeId, label: Option<Symbol>) -> Result<(), GraphError> {
        let old = {
            let data = self.nodes.get_mut(&id).ok_or(GraphError::MissingNode(id))?;
            std::mem::replace(&mut data.label, label.clone())
        };
        self.unindex_label(id, old.as_ref());
        if let Some(l) = label {
            self.by_label.entry(l).or_default().insert(id);
        }
        Ok(())
    }

    pub fn set_root(&mut self, id: NodeId, root: Option<bool>) -> Result<(), GraphError> {
        let data = self.nodes.get_mut(&id).ok_or(GraphError::MissingNode(id))?;
        data.root = root;
        if root == Some(true) {
            self.roots.insert(id);
        } else {
            self.roots.remove(&id);
        }
        Ok(())
    }

    fn unindex_label(&mut self, id: NodeId, label: Option<&Symbol>) {
        if let Some(l) = label {
            if let Some(set) = self.by_label.get_mut(l) {
                set.remove(&id);
                if set.is_empty() {
                    self.by_label.remove(l);
                }
            }
        }
    }

    // ----- access ---------------------------------------------------------

    pub fn node(&self, id: NodeId) -> Option<&NodeData> {
        self.nodes.get(&id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&EdgeData> {
        self.edges.get(&id)
    }

    pub fn contains_node(&self, id: NodeId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.edges.contains_key(&id)
    }

    pub fn label(&self, id: NodeId) -> Option<&Symbol> {
        self.nodes.get(&id).and_then(|n| n.label.as_ref())
    }

    pub fn root(&self, id: NodeId) -> Option<bool> {
        self.nodes.get(&id).and_then(|n| n.root)
    }

    pub fn nodes(&self) -> impl DoubleEndedIterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn edges(&self) -> impl DoubleEndedIterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn node_entries(&self) -> impl Iterator<Item = (NodeId, &NodeData)> + '_ {
        self.nodes.iter().map(|(k, v)| (*k, v))
    }

    pub fn edge_entries(&self) -> impl Iterator<Item = (EdgeId, &EdgeData)> + '_ {
        self.edges.iter().map(|(k, v)| (*k, v))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `|G| = |V| + |E|`.
    pub fn size(&self) -> usize {
        self.nodes.len() + self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes whose rootedness is defined and equal to 1.
    pub fn roots(&self) -> &BTreeSet<NodeId> {
        &self.roots
    }

    pub fn nodes_with_label<'a>(&'a self, label: &Symbol) -> impl Iterator<Item = NodeId> + 'a {
        self.by_label
            .get(label)
            .into_iter()
            .flat_map(|s| s.iter().copied())
    }

    pub fn out_edges(&self, v: NodeId) -> impl DoubleEndedIterator<Item = EdgeId> + '_ {
        self.nodes
            .get(&v)
            .into_iter()
            .flat_map(|n| n.out_edges.iter().copied())
    }

    pub fn in_edges(&self, v: NodeId) -> impl DoubleEndedIterator<Item = EdgeId> + '_ {
        self.nodes
            .get(&v)
            .into_iter()
            .flat_map(|n| n.in_edges.iter().copied())
    }

    /// Incident edges, each listed once (loops included once).
    pub fn incident_edges(&self, v: NodeId) -> BTreeSet<EdgeId> {
        self.out_edges(v).chain(self.in_edges(v)).collect()
    }

    pub fn next_node_id(&self) -> NodeId {
        NodeId(self.next_node)
    }

    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.next_edge)
    }

    // ----- structural queries ---------------------------------------------

    pub fn indegree(&self, v: NodeId) -> usize {
        self.nodes.get(&v).map_or(0, |n| n.in_edges.len())
    }

    pub fn outdegree(&self, v: NodeId) -> usize {
        self.nodes.get(&v).map_or(0, |n| n.out_edges.len())
    }

    /// `indeg + outdeg`; a loop counts twice.
    pub fn degree(&self, v: NodeId) -> usize {
        self.indegree(v) + self.outdegree(v)
    }

    pub fn degrees(&self, v: NodeId) -> (usize, usize, usize) {
        (self.indegree(v), self.outdegree(v), self.degree(v))
    }

    pub fn children(&self, v: NodeId) -> BTreeSet<NodeId> {
        self.out_edges(v).map(|e| self.edges[&e].target).collect()
    }

    pub fn parents(&self, v: NodeId) -> BTreeSet<NodeId> {
        self.in_edges(v).map(|e| self.edges[&e].source).collect()
    }

    pub fn neighbourhood(&self, v: NodeId) -> BTreeSet<NodeId> {
        let mut n = self.children(v);
        n.extend(self.parents(v));
        n
    }

    pub fn is_totally_labelled(&self) -> bool {
        self.nodes.values().all(|n| n.label.is_some())
    }

    pub fn is_totally_rooted(&self) -> bool {
        self.nodes.values().all(|n| n.root.is_some())
    }

    /// Totally labelled and totally rooted.
    pub fn is_tlrg(&self) -> bool {
        self.is_totally_labelled() && self.is_totally_rooted()
    }

    /// Node sets of the connected components, ordered by least node id.
    pub fn component_node_sets(&self) -> Vec<BTreeSet<NodeId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for start in self.nodes() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start];
            seen.insert(start);
            while let Some(v) = stack.pop() {
                comp.insert(v);
                for w in self.neighbourhood(v) {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn connected_components(&self) -> Vec<Graph> {
        self.component_node_sets()
            .into_iter()
            .map(|nodes| self.induced_subgraph(&nodes))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.component_node_sets().len() <= 1
    }

    /// Subgraph on `nodes` with every edge whose endpoints both lie in it.
    pub fn induced_subgraph(&self, nodes: &BTreeSet<NodeId>) -> Graph {
        let mut g = Graph::new();
        for &v in nodes {
            let n = &self.nodes[&v];
            g.insert_node(v, n.label.clone(), n.root).unwrap();
        }
        for (e, d) in &self.edges {
            if nodes.contains(&d.source) && nodes.contains(&d.target) {
                g.insert_edge(*e, d.source, d.target, d.label.clone()).unwrap();
            }
        }
        g
    }

    /// No directed cycle (a loop is a directed cycle).
    pub fn is_acyclic(&self) -> bool {
        self.is_acyclic_filtered(|_| true)
    }

    /// Directed acyclicity of the subgraph made of the edges accepted by
    /// `keep`.
    pub fn is_acyclic_filtered(&self, keep: impl Fn(&EdgeData) -> bool) -> bool {
        let mut indeg: BTreeMap<NodeId, usize> = self.nodes().map(|v| (v, 0)).collect();
        for d in self.edges.values().filter(|d| keep(d)) {
            *indeg.get_mut(&d.target).unwrap() += 1;
        }
        let mut ready: Vec<NodeId> = indeg
            .iter()
            .filter(|(_, &k)| k == 0)
            .map(|(&v, _)| v)
            .collect();
        let mut removed = 0;
        while let Some(v) = ready.pop() {
            removed += 1;
            for e in self.out_edges(v) {
                let d = &self.edges[&e];
                if !keep(d) {
                    continue;
                }
                let k = indeg.get_mut(&d.target).unwrap();
                *k -= 1;
                if *k == 0 {
                    ready.push(d.target);
                }
            }
        }
        removed == self.nodes.len()
    }

    /// Whether the underlying undirected multigraph has a cycle. Loops and
    /// parallel edges count as cycles.
    pub fn has_undirected_cycle(&self) -> bool {
        let index: BTreeMap<NodeId, usize> =
            self.nodes().enumerate().map(|(i, v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..index.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for d in self.edges.values() {
            let a = find(&mut parent, index[&d.source]);
            let b = find(&mut parent, index[&d.target]);
            if a == b {
                return true;
            }
            parent[a] = b;
        }
        false
    }

    /// The node and edge labels that occur in the graph.
    pub fn alphabet(&self) -> LabelAlphabet {
        LabelAlphabet {
            node_labels: self.nodes.values().filter_map(|n| n.label.clone()).collect(),
            edge_labels: self.edges.values().map(|e| e.label.clone()).collect(),
            ..Default::default()
        }
    }

    /// Checks that all labels come from `alphabet`.
    pub fn validate(&self, alphabet: &LabelAlphabet) -> Vec<Violation> {
        let mut out = Vec::new();
        for (v, n) in &self.nodes {
            if let Some(l) = &n.label {
                if !alphabet.node_labels.contains(l) {
                    out.push(Violation::UnknownNodeLabel {
                        node: *v,
                        label: l.clone(),
                    });
                }
            }
        }
        for (e, d) in &self.edges {
            if !alphabet.edge_labels.contains(&d.label) {
                out.push(Violation::UnknownEdgeLabel {
                    edge: *e,
                    label: d.label.clone(),
                });
            }
        }
        out
    }

    /// Returns the same graph with every node label, rootedness and edge
    /// label replaced: `label`, unrooted (0), `edge_label`.
    pub fn flattened(&self, label: &Symbol, edge_label: &Symbol) -> Graph {
        let mut g = Graph::new();
        for v in self.nodes() {
            g.insert_node(v, Some(label.clone()), Some(false)).unwrap();
        }
        for (e, d) in &self.edges {
            g.insert_edge(*e, d.source, d.target, edge_label.clone())
                .unwrap();
        }
        g
    }
}

/// One broken well-formedness condition of a graph description.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
pub enum Violation {
    #[error("duplicate node {0}")]
    DuplicateNode(NodeId),
    #[error("duplicate edge {0}")]
    DuplicateEdge(EdgeId),
    #[error("dangling source: edge {edge} starts at missing node {node}")]
    DanglingSource { edge: EdgeId, node: NodeId },
    #[error("dangling target: edge {edge} ends at missing node {node}")]
    DanglingTarget { edge: EdgeId, node: NodeId },
    #[error("unknown label: node {node} has label {label} outside the alphabet")]
    UnknownNodeLabel { node: NodeId, label: Symbol },
    #[error("unknown label: edge {edge} has label {label} outside the alphabet")]
    UnknownEdgeLabel { edge: EdgeId, label: Symbol },
}

/// An unchecked graph, as read from a file. Building a [`Graph`] from it
/// fails with the full list of violations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphDescription {
    pub nodes: Vec<(NodeId, Option<Symbol>, Option<bool>)>,
    pub edges: Vec<(EdgeId, NodeId, NodeId, Symbol)>,
}

impl GraphDescription {
    /// Every broken invariant, in input order. An `alphabet` of `None`
    /// skips the label checks.
    pub fn violations(&self, alphabet: Option<&LabelAlphabet>) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut nodes = BTreeSet::new();
        for (v, label, _) in &self.nodes {
            if !nodes.insert(*v) {
                out.push(Violation::DuplicateNode(*v));
            }
            if let (Some(a), Some(l)) = (alphabet, label) {
                if !a.node_labels.contains(l) {
                    out.push(Violation::UnknownNodeLabel {
                        node: *v,
                        label: l.clone(),
                    });
                }
            }
        }
        let mut edges = BTreeSet::new();
        for (e, s, t, label) in &self.edges {
            if !edges.insert(*e) {
                out.push(Violation::DuplicateEdge(*e));
            }
            if !nodes.contains(s) {
                out.push(Violation::DanglingSource { edge: *e, node: *s });
            }
            if !nodes.contains(t) {
                out.push(Violation::DanglingTarget { edge: *e, node: *t });
            }
            if let Some(a) = alphabet {
                if !a.edge_labels.contains(label) {
                    out.push(Violation::UnknownEdgeLabel {
                        edge: *e,
                        label: label.clone(),
                    });
                }
            }
        }
        out
    }

    pub fn build(&self) -> Result<Graph, Vec<Violation>> {
        let violations = self.violations(None);
        if !violations.is_empty() {
            return Err(violations);
        }
        let mut g = Graph::new();
        for (v, l, r) in &self.nodes {
            g.insert_node(*v, l.clone(), *r).unwrap();
        }
        for (e, s, t, l) in &self.edges {
            g.insert_edge(*e, *s, *t, l.clone()).unwrap();
        }
        Ok(g)
    }
}

impl From<&Graph> for GraphDescription {
    fn from(g: &Graph) -> Self {
        GraphDescription {
            nodes: g
                .node_entries()
                .map(|(v, n)| (v, n.label.clone(), n.root))
                .collect(),
            edges: g
                .edge_entries()
                .map(|(e, d)| (e, d.source, d.target, d.label.clone()))
                .collect(),
        }
    }
}

/// Validates a description against an alphabet; an empty result means ok.
pub fn validate_graph(g: &GraphDescription, alphabet: &LabelAlphabet) -> Vec<Violation> {
    g.violations(Some(alphabet))
}
