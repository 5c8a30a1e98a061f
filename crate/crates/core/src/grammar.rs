//! Graph grammars, membership by inverse reduction, and tree recognition.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::builtin::{tree_recognition_system, BOX};
use crate::derivation::{rule_steps, CompiledSystem, GtSystem};
use crate::graph::{Graph, NodeId};
use crate::iso::{are_isomorphic, IsoSet};
use crate::matching::MatchStats;
use crate::symbol::Symbol;

/// A search budget counted in direct derivations, optionally cancellable
/// from another thread.
#[derive(Clone, Debug)]
pub struct Budget {
    pub derivations: u64,
    cancel: Option<Arc<AtomicBool>>,
}

impl Budget {
    pub fn new(derivations: u64) -> Self {
        Budget {
            derivations,
            cancel: None,
        }
    }

    pub fn with_cancel(mut self, flag: Arc<AtomicBool>) -> Self {
        self.cancel = Some(flag);
        self
    }

    pub fn cancelled(&self) -> bool {
        self.cancel
            .as_ref()
            .is_some_and(|c| c.load(Ordering::Relaxed))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    Yes,
    No,
    BudgetExceeded,
}

/// A grammar `(L, N, R, S)`; the non-terminals live in the system's
/// alphabet.
#[derive(Clone, Debug)]
pub struct Grammar {
    pub system: GtSystem,
    pub start: Graph,
    tree_shortcut: bool,
}

impl Grammar {
    pub fn new(system: GtSystem, start: Graph) -> Self {
        Grammar {
            system,
            start,
            tree_shortcut: false,
        }
    }

    /// Decide membership of unrooted all-box graphs with the linear-time
    /// tree recognizer instead of searching. Only sound for the TREE
    /// grammar.
    pub fn with_tree_shortcut(mut self) -> Self {
        self.tree_shortcut = true;
        self
    }

    /// No node or edge label is a non-terminal.
    pub fn is_terminally_labelled(&self, g: &Graph) -> bool {
        let a = &self.system.alphabet;
        g.node_entries().all(|(_, n)| {
            n.label
                .as_ref()
                .is_none_or(|l| !a.nonterminal_nodes.contains(l))
        }) && g
            .edge_entries()
            .all(|(_, d)| !a.nonterminal_edges.contains(&d.label))
    }

    /// Searches for a reduction of `g` to the start graph by the inverse
    /// rules. `No` is only returned once every reachable graph has been
    /// visited.
    pub fn member(&self, g: &Graph, budget: &Budget) -> Membership {
        if !self.is_terminally_labelled(g) || !g.validate(&self.system.alphabet).is_empty() {
            return Membership::No;
        }
        if self.tree_shortcut {
            let boxy = Symbol::new(BOX);
            let plain = !g.is_empty()
                && g.node_entries()
                    .all(|(_, n)| n.label.as_ref() == Some(&boxy) && n.root == Some(false));
            if plain {
                let planted = plant_root(g).expect("non-empty");
                let rec = recognize_tree(&planted).expect("planted graph is an input graph");
                return if rec.is_tree {
                    Membership::Yes
                } else {
                    Membership::No
                };
            }
        }
        let inverse = self.system.invert();
        let mut visited = IsoSet::new();
        visited.insert(g.clone());
        let mut queue = VecDeque::from([g.clone()]);
        let mut spent = 0u64;
        while let Some(x) = queue.pop_front() {
            if x.size() == self.start.size() && are_isomorphic(&x, &self.start) {
                return Membership::Yes;
            }
            for rule in &inverse.rules {
                for step in rule_steps(rule, &x) {
                    spent += 1;
                    if spent > budget.derivations || budget.cancelled() {
                        return Membership::BudgetExceeded;
                    }
                    if visited.insert(step.result.clone()).1 {
                        queue.push_back(step.result);
                    }
                }
            }
        }
        Membership::No
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InputError {
    #[error("input graph must have exactly one root node, found {0}")]
    RootCount(usize),
    #[error("input graph must be totally labelled and rooted")]
    NotTotal,
    #[error("node {0} is not labelled box")]
    NodeLabel(NodeId),
    #[error("an edge is not labelled box")]
    EdgeLabel,
}

/// An input graph has exactly one root and every label is box.
pub fn check_input_graph(g: &Graph) -> Result<(), InputError> {
    if !g.is_tlrg() {
        return Err(InputError::NotTotal);
    }
    let boxy = Symbol::new(BOX);
    if let Some((v, _)) = g.node_entries().find(|(_, n)| n.label.as_ref() != Some(&boxy)) {
        return Err(InputError::NodeLabel(v));
    }
    if g.edge_entries().any(|(_, d)| d.label != boxy) {
        return Err(InputError::EdgeLabel);
    }
    if g.roots().len() != 1 {
        return Err(InputError::RootCount(g.roots().len()));
    }
    Ok(())
}

/// The graph with every label box, and only the lowest-id node rooted.
/// `None` for the empty graph.
pub fn plant_root(g: &Graph) -> Option<Graph> {
    let first = g.nodes().next()?;
    let boxy = Symbol::new(BOX);
    let mut out = g.flattened(&boxy, &boxy);
    out.set_root(first, Some(true)).unwrap();
    Some(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeRecognition {
    pub is_tree: bool,
    pub steps: usize,
    /// Rule index (into `r0, r1, r2`) of each step.
    pub trace: Vec<usize>,
    #[serde(skip)]
    pub normal_form: Graph,
    pub stats: MatchStats,
}

/// Reduces an input graph greedily with the tree recognition rules and
/// reports whether the normal form is a single rooted box node.
pub fn recognize_tree(g: &Graph) -> Result<TreeRecognition, InputError> {
    let mut g = g.clone();
    recognize_tree_in_place(&mut g)
}

/// As [`recognize_tree`], consuming the graph.
pub fn recognize_tree_in_place(g: &mut Graph) -> Result<TreeRecognition, InputError> {
    check_input_graph(g)?;
    let system = tree_recognition_system();
    let compiled = CompiledSystem::new(&system);
    let run = compiled.run_greedy(g, usize::MAX);
    let boxy = Symbol::new(BOX);
    let is_tree = g.node_count() == 1
        && g.edge_count() == 0
        && g.node_entries()
            .all(|(_, n)| n.label.as_ref() == Some(&boxy) && n.root == Some(true));
    Ok(TreeRecognition {
        is_tree,
        steps: run.steps,
        trace: run.trace,
        normal_form: std::mem::take(g),
        stats: run.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::tree_grammar;

    fn boxed(n: u32, edges: &[(u32, u32)]) -> Graph {
        let mut g = Graph::new();
        for i in 0..n {
            g.insert_node(NodeId(i), Some(Symbol::new(BOX)), Some(false))
                .unwrap();
        }
        for (s, t) in edges {
            g.add_edge(NodeId(*s), NodeId(*t), Symbol::new(BOX)).unwrap();
        }
        g
    }

    #[test]
    fn tree_membership() {
        let gr = tree_grammar();
        let b = Budget::new(10_000);
        assert_eq!(gr.member(&boxed(1, &[]), &b), Membership::Yes);
        let tree = boxed(5, &[(0, 1), (0, 2), (1, 3), (2, 4)]);
        assert_eq!(gr.member(&tree, &b), Membership::Yes);
        let cycle = boxed(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(gr.member(&cycle, &b), Membership::No);
    }

    #[test]
    fn membership_by_search_agrees_with_shortcut() {
        let plain = Grammar::new(tree_grammar().system, tree_grammar().start);
        let b = Budget::new(100_000);
        let tree = boxed(5, &[(0, 1), (0, 2), (1, 3), (2, 4)]);
        assert_eq!(plain.member(&tree, &b), Membership::Yes);
        let cycle = boxed(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(plain.member(&cycle, &b), Membership::No);
        let forest = boxed(4, &[(0, 1), (2, 3)]);
        assert_eq!(plain.member(&forest, &b), Membership::No);
        assert_eq!(plain.member(&tree, &Budget::new(1)), Membership::BudgetExceeded);
    }

    #[test]
    fn cancelled_search_stops() {
        let plain = Grammar::new(tree_grammar().system, tree_grammar().start);
        let flag = Arc::new(AtomicBool::new(true));
        let tree = boxed(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(
            plain.member(&tree, &Budget::new(1000).with_cancel(flag)),
            Membership::BudgetExceeded
        );
    }

    #[test]
    fn input_graph_precondition() {
        let g = boxed(2, &[(0, 1)]);
        assert_eq!(recognize_tree(&g).unwrap_err(), InputError::RootCount(0));
        let planted = plant_root(&g).unwrap();
        let rec = recognize_tree(&planted).unwrap();
        assert!(rec.is_tree);
        assert!(rec.steps <= 4);
        assert!(plant_root(&Graph::new()).is_none());
    }
}
