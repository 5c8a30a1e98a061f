//! Rules `⟨L ← K → R⟩` with inclusions expressed by shared ids.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{EdgeId, Graph, NodeId};
use crate::iso::for_each_isomorphism;
use crate::morphism::is_subgraph;
use crate::symbol::LabelAlphabet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule {rule}: {side} side is not totally labelled and rooted")]
    NotTotal { rule: String, side: &'static str },
    #[error("rule {rule}: interface is not a subgraph of the {side} side")]
    NotIncluded { rule: String, side: &'static str },
    #[error("rule {rule}: node {id} occurs in left and right but not in the interface")]
    SharedNode { rule: String, id: NodeId },
    #[error("rule {rule}: edge {id} occurs in left and right but not in the interface")]
    SharedEdge { rule: String, id: EdgeId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub lhs: Graph,
    pub interface: Graph,
    pub rhs: Graph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RuleClass {
    pub fast: bool,
    pub root_non_increasing: bool,
    pub degree_non_increasing: bool,
}

impl Rule {
    pub fn new(
        name: impl Into<String>,
        lhs: Graph,
        interface: Graph,
        rhs: Graph,
    ) -> Result<Rule, RuleError> {
        let name = name.into();
        if !lhs.is_tlrg() {
            return Err(RuleError::NotTotal { rule: name, side: "left" });
        }
        if !rhs.is_tlrg() {
            return Err(RuleError::NotTotal { rule: name, side: "right" });
        }
        if !is_subgraph(&interface, &lhs) {
            return Err(RuleError::NotIncluded { rule: name, side: "left" });
        }
        if !is_subgraph(&interface, &rhs) {
            return Err(RuleError::NotIncluded { rule: name, side: "right" });
        }
        for v in lhs.nodes() {
            if rhs.contains_node(v) && !interface.contains_node(v) {
                return Err(RuleError::SharedNode { rule: name, id: v });
            }
        }
        for e in lhs.edges() {
            if rhs.contains_edge(e) && !interface.contains_edge(e) {
                return Err(RuleError::SharedEdge { rule: name, id: e });
            }
        }
        Ok(Rule {
            name,
            lhs,
            interface,
            rhs,
        })
    }

    /// `|r| = max(|L|, |R|)`.
    pub fn size(&self) -> usize {
        self.lhs.size().max(self.rhs.size())
    }

    /// `⟨R ← K → L⟩`.
    pub fn invert(&self) -> Rule {
        Rule {
            name: self.name.clone(),
            lhs: self.rhs.clone(),
            interface: self.interface.clone(),
            rhs: self.lhs.clone(),
        }
    }

    /// The same rule with the interface stripped to its bare nodes.
    pub fn normalize(&self) -> Rule {
        let mut k = Graph::new();
        for v in self.interface.nodes() {
            k.insert_node(v, None, None).unwrap();
        }
        Rule {
            name: self.name.clone(),
            lhs: self.lhs.clone(),
            interface: k,
            rhs: self.rhs.clone(),
        }
    }

    pub fn deleted_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.lhs.nodes().filter(|v| !self.interface.contains_node(*v))
    }

    pub fn deleted_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.lhs.edges().filter(|e| !self.interface.contains_edge(*e))
    }

    pub fn created_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.rhs.nodes().filter(|v| !self.interface.contains_node(*v))
    }

    pub fn created_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.rhs.edges().filter(|e| !self.interface.contains_edge(*e))
    }

    /// Interface nodes whose label or rootedness is left undefined, i.e.
    /// the nodes the rule may relabel or re-root.
    pub fn cleared_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.interface.node_entries().filter_map(|(v, n)| {
            (n.label.is_none() || n.root.is_none()).then_some(v)
        })
    }

    pub fn is_fast(&self) -> bool {
        self.lhs
            .component_node_sets()
            .iter()
            .all(|c| c.iter().any(|v| self.lhs.root(*v) == Some(true)))
    }

    pub fn classify(&self, degree_bound: usize) -> RuleClass {
        let created_ok = self
            .created_nodes()
            .all(|v| self.rhs.degree(v) <= degree_bound);
        let kept_ok = self
            .interface
            .nodes()
            .all(|v| self.lhs.degree(v) >= self.rhs.degree(v));
        RuleClass {
            fast: self.is_fast(),
            root_non_increasing: self.lhs.roots().len() >= self.rhs.roots().len(),
            degree_non_increasing: created_ok && kept_ok,
        }
    }

    pub fn alphabet(&self) -> LabelAlphabet {
        self.lhs.alphabet().union(&self.rhs.alphabet())
    }

    /// Left and right sides both have every label in `alphabet`.
    pub fn is_over(&self, alphabet: &LabelAlphabet) -> bool {
        self.lhs.validate(alphabet).is_empty() && self.rhs.validate(alphabet).is_empty()
    }
}

/// Isomorphisms `f: L1 → L2` and `g: R1 → R2` that agree on `K1` and map
/// `K1` onto `K2`.
pub fn rules_isomorphic(r1: &Rule, r2: &Rule) -> bool {
    let (k1, k2) = (&r1.interface, &r2.interface);
    if k1.node_count() != k2.node_count() || k1.edge_count() != k2.edge_count() {
        return false;
    }
    let mut found = false;
    for_each_isomorphism(&r1.lhs, &r2.lhs, &[], &[], |f| {
        // Parallel edges of L are paired by id order, so try every
        // bijection of K-edges into K2 compatible with f on nodes.
        let Some(k_nodes) = k1
            .nodes()
            .map(|v| {
                let w = f.node(v)?;
                let (a, b) = (k1.node(v)?, k2.node(w)?);
                (a.label == b.label && a.root == b.root).then_some((v, w))
            })
            .collect::<Option<Vec<_>>>()
        else {
            return ControlFlow::Continue(());
        };
        for k_edges in edge_bijections(k1, k2, &k_nodes) {
            if crate::iso::find_isomorphism_with(&r1.rhs, &r2.rhs, &k_nodes, &k_edges).is_some()
                && crate::iso::find_isomorphism_with(&r1.lhs, &r2.lhs, &k_nodes, &k_edges)
                    .is_some()
            {
                found = true;
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    found
}

/// Every bijection between the edges of `a` and `b` that is consistent with
/// the node pairing.
fn edge_bijections(a: &Graph, b: &Graph, nodes: &[(NodeId, NodeId)]) -> Vec<Vec<(EdgeId, EdgeId)>> {
    let map: std::collections::BTreeMap<NodeId, NodeId> = nodes.iter().copied().collect();
    let edges: Vec<EdgeId> = a.edges().collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let mut used = BTreeSet::new();
    fn go(
        i: usize,
        a: &Graph,
        b: &Graph,
        edges: &[EdgeId],
        map: &std::collections::BTreeMap<NodeId, NodeId>,
        cur: &mut Vec<(EdgeId, EdgeId)>,
        used: &mut BTreeSet<EdgeId>,
        out: &mut Vec<Vec<(EdgeId, EdgeId)>>,
    ) {
        if i == edges.len() {
            out.push(cur.clone());
            return;
        }
        let d = a.edge(edges[i]).unwrap();
        for (f, fd) in b.edge_entries() {
            if used.contains(&f)
                || Some(&fd.source) != map.get(&d.source)
                || Some(&fd.target) != map.get(&d.target)
                || fd.label != d.label
            {
                continue;
            }
            used.insert(f);
            cur.push((edges[i], f));
            go(i + 1, a, b, edges, map, cur, used, out);
            cur.pop();
            used.remove(&f);
        }
    }
    go(0, a, b, &edges, &map, &mut cur, &mut used, &mut out);
    out
}
