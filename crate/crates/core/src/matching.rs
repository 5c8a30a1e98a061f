//! Injective matching of left-hand sides, with a root-anchored fast path.
//!
//! A left-hand side is compiled into a search plan: one anchor per
//! connected component, then a walk along the component's edges. Each edge
//! step either binds a new node through the host adjacency of an already
//! bound node, or closes an edge between two bound nodes.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{EdgeId, Graph, NodeId};
use crate::morphism::Morphism;
use crate::rule::Rule;
use crate::symbol::Symbol;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("left-hand side has a connected component without a root node")]
pub struct NotFast;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    /// Bind pattern node from a candidate set: the root index if the node
    /// is rooted (and the plan is anchored), otherwise the label index.
    Anchor { node: usize },
    /// Bind `to` by following pattern edge `edge` from the bound `from`.
    Extend {
        edge: usize,
        from: usize,
        to: usize,
        outgoing: bool,
    },
    /// Both endpoints bound; bind the edge.
    Close { edge: usize },
}

/// Counters for the work done by a search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MatchStats {
    /// Host nodes tried as anchor images.
    pub anchors: u64,
    /// Partial assignments extended by one item.
    pub extensions: u64,
    /// Complete injective morphisms found (before the dangling check).
    pub complete: u64,
}

/// A compiled left-hand side.
#[derive(Clone, Debug)]
pub struct Pattern {
    nodes: Vec<NodeId>,
    labels: Vec<Option<Symbol>>,
    roots: Vec<Option<bool>>,
    degree: Vec<usize>,
    edges: Vec<(EdgeId, usize, usize, Symbol)>,
    steps: Vec<Step>,
    fast: bool,
}

impl Pattern {
    pub fn new(l: &Graph) -> Pattern {
        let nodes: Vec<NodeId> = l.nodes().collect();
        let index: BTreeMap<NodeId, usize> =
            nodes.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let edges: Vec<(EdgeId, usize, usize, Symbol)> = l
            .edge_entries()
            .map(|(e, d)| (e, index[&d.source], index[&d.target], d.label.clone()))
            .collect();
        let edge_index: BTreeMap<EdgeId, usize> =
            edges.iter().enumerate().map(|(i, e)| (e.0, i)).collect();
        let mut steps = Vec::new();
        let mut fast = true;
        let mut bound = vec![false; nodes.len()];
        let mut done = vec![false; edges.len()];
        for comp in l.component_node_sets() {
            let anchor = comp
                .iter()
                .copied()
                .find(|v| l.root(*v) == Some(true))
                .unwrap_or_else(|| {
                    fast = false;
                    *comp.iter().next().unwrap()
                });
            bound[index[&anchor]] = true;
            steps.push(Step::Anchor { node: index[&anchor] });
            let mut queue = vec![anchor];
            let mut head = 0;
            while head < queue.len() {
                let v = queue[head];
                head += 1;
                let vi = index[&v];
                let incident: Vec<(EdgeId, bool)> = l
                    .out_edges(v)
                    .map(|e| (e, true))
                    .chain(l.in_edges(v).map(|e| (e, false)))
                    .collect();
                for (e, outgoing) in incident {
                    let ei = edge_index[&e];
                    if done[ei] {
                        continue;
                    }
                    done[ei] = true;
                    let (_, s, t, _) = edges[ei];
                    let other = if outgoing { t } else { s };
                    if bound[other] {
                        steps.push(Step::Close { edge: ei });
                    } else {
                        bound[other] = true;
                        steps.push(Step::Extend {
                            edge: ei,
                            from: vi,
                            to: other,
                            outgoing,
                        });
                        queue.push(nodes[other]);
                    }
                }
            }
        }
        Pattern {
            labels: nodes.iter().map(|v| l.label(*v).cloned()).collect(),
            roots: nodes.iter().map(|v| l.root(*v)).collect(),
            degree: nodes.iter().map(|v| l.degree(*v)).collect(),
            nodes,
            edges,
            steps,
            fast,
        }
    }

    /// Every component of the pattern contains a root node.
    pub fn is_fast(&self) -> bool {
        self.fast
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.nodes
    }

    fn compatible(&self, i: usize, host: &Graph, w: NodeId) -> bool {
        let Some(n) = host.node(w) else { return false };
        (self.labels[i].is_none() || self.labels[i] == n.label)
            && (self.roots[i].is_none() || self.roots[i] == n.root)
    }
}

/// A partial assignment during search, indexed like the pattern.
#[derive(Clone, Debug)]
pub struct Assignment {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
}

impl Assignment {
    pub fn to_morphism(&self, p: &Pattern) -> Morphism {
        Morphism {
            nodes: p.nodes.iter().copied().zip(self.nodes.iter().copied()).collect(),
            edges: p
                .edges
                .iter()
                .map(|e| e.0)
                .zip(self.edges.iter().copied())
                .collect(),
        }
    }
}

struct Searcher<'a, F> {
    p: &'a Pattern,
    host: &'a Graph,
    anchored: bool,
    a: Assignment,
    stats: &'a mut MatchStats,
    visit: F,
}

const UNSET_N: NodeId = NodeId(u32::MAX);
const UNSET_E: EdgeId = EdgeId(u32::MAX);

impl<F: FnMut(&Assignment) -> ControlFlow<()>> Searcher<'_, F> {
    fn node_used(&self, w: NodeId) -> bool {
        self.a.nodes.contains(&w)
    }

    fn bind_node(&mut self, i: usize, w: NodeId, k: usize) -> ControlFlow<()> {
        if self.node_used(w) || !self.p.compatible(i, self.host, w) {
            return ControlFlow::Continue(());
        }
        self.stats.extensions += 1;
        self.a.nodes[i] = w;
        let r = self.run(k);
        self.a.nodes[i] = UNSET_N;
        r
    }

    fn run(&mut self, k: usize) -> ControlFlow<()> {
        let Some(step) = self.p.steps.get(k).copied() else {
            self.stats.complete += 1;
            return (self.visit)(&self.a);
        };
        match step {
            Step::Anchor { node } => {
                let rooted = self.p.roots[node] == Some(true);
                if rooted && self.anchored {
                    let cands: Vec<NodeId> = self.host.roots().iter().copied().collect();
                    for w in cands {
                        self.stats.anchors += 1;
                        self.bind_node(node, w, k + 1)?;
                    }
                } else if let Some(l) = &self.p.labels[node] {
                    let cands: Vec<NodeId> = self.host.nodes_with_label(l).collect();
                    for w in cands {
                        self.stats.anchors += 1;
                        self.bind_node(node, w, k + 1)?;
                    }
                } else {
                    let cands: Vec<NodeId> = self.host.nodes().collect();
                    for w in cands {
                        self.stats.anchors += 1;
                        self.bind_node(node, w, k + 1)?;
                    }
                }
                ControlFlow::Continue(())
            }
            Step::Extend {
                edge,
                from,
                to,
                outgoing,
            } => {
                let host = self.host;
                let w = self.a.nodes[from];
                let label = &self.p.edges[edge].3;
                let (outs, ins) = if outgoing {
                    (Some(host.out_edges(w)), None)
                } else {
                    (None, Some(host.in_edges(w)))
                };
                for f in outs.into_iter().flatten().chain(ins.into_iter().flatten()) {
                    let d = host.edge(f).unwrap();
                    if d.label != *label {
                        continue;
                    }
                    let other = if outgoing { d.target } else { d.source };
                    self.a.edges[edge] = f;
                    let r = self.bind_node(to, other, k + 1);
                    self.a.edges[edge] = UNSET_E;
                    r?;
                }
                ControlFlow::Continue(())
            }
            Step::Close { edge } => {
                let host = self.host;
                let (_, s, t, ref label) = self.p.edges[edge];
                let (ws, wt) = (self.a.nodes[s], self.a.nodes[t]);
                for f in host.out_edges(ws) {
                    let d = host.edge(f).unwrap();
                    if d.target != wt || d.label != *label || self.a.edges.contains(&f) {
                        continue;
                    }
                    self.stats.extensions += 1;
                    self.a.edges[edge] = f;
                    let r = self.run(k + 1);
                    self.a.edges[edge] = UNSET_E;
                    r?;
                }
                ControlFlow::Continue(())
            }
        }
    }
}

/// Visits every injective morphism from the pattern into `host`, in search
/// order. With `anchored`, rooted anchors are drawn from the host's root
/// index.
pub fn for_each_match(
    p: &Pattern,
    host: &Graph,
    anchored: bool,
    stats: &mut MatchStats,
    visit: impl FnMut(&Assignment) -> ControlFlow<()>,
) {
    if p.nodes.len() > host.node_count() || p.edges.len() > host.edge_count() {
        return;
    }
    let mut s = Searcher {
        p,
        host,
        anchored,
        a: Assignment {
            nodes: vec![UNSET_N; p.nodes.len()],
            edges: vec![UNSET_E; p.edges.len()],
        },
        stats,
        visit,
    };
    let _ = s.run(0);
}

/// All injective morphisms `L → host`, sorted by node images (in L-id
/// order) and then edge images.
pub fn find_matches(l: &Graph, host: &Graph) -> Vec<Morphism> {
    let p = Pattern::new(l);
    collect(&p, host, false, &mut MatchStats::default())
}

/// As [`find_matches`], searching only from the host's root nodes.
pub fn find_matches_fast(l: &Graph, host: &Graph) -> Result<Vec<Morphism>, NotFast> {
    find_matches_fast_with_stats(l, host, &mut MatchStats::default())
}

pub fn find_matches_fast_with_stats(
    l: &Graph,
    host: &Graph,
    stats: &mut MatchStats,
) -> Result<Vec<Morphism>, NotFast> {
    let p = Pattern::new(l);
    if !p.is_fast() {
        return Err(NotFast);
    }
    Ok(collect(&p, host, true, stats))
}

fn collect(p: &Pattern, host: &Graph, anchored: bool, stats: &mut MatchStats) -> Vec<Morphism> {
    let mut out = Vec::new();
    for_each_match(p, host, anchored, stats, |a| {
        out.push(a.clone());
        ControlFlow::Continue(())
    });
    out.sort_by(|a, b| (&a.nodes, &a.edges).cmp(&(&b.nodes, &b.edges)));
    out.iter().map(|a| a.to_morphism(p)).collect()
}

/// No host edge outside the image of the match touches the image of a
/// deleted node.
pub fn satisfies_dangling(rule: &Rule, m: &Morphism, host: &Graph) -> bool {
    rule.deleted_nodes().all(|v| match m.node(v) {
        Some(w) => host.degree(w) == rule.lhs.degree(v),
        None => false,
    })
}

/// The dangling check on a raw assignment: `deleted[i]` marks pattern
/// nodes outside the interface.
pub fn assignment_dangling_ok(p: &Pattern, a: &Assignment, deleted: &[bool], host: &Graph) -> bool {
    deleted
        .iter()
        .enumerate()
        .all(|(i, &d)| !d || host.degree(a.nodes[i]) == p.degree[i])
}
