//! Rule application, direct successors, normal forms and derivation
//! strategies.

use std::collections::{BTreeMap, VecDeque};
use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::iso::IsoSet;
use crate::matching::{
    assignment_dangling_ok, find_matches, for_each_match, satisfies_dangling, MatchStats, Pattern,
};
use crate::morphism::{is_injective, is_morphism, Morphism};
use crate::rule::Rule;
use crate::symbol::LabelAlphabet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApplyError {
    #[error("match is not a morphism from the left-hand side into the host")]
    NotAMorphism,
    #[error("match is not injective")]
    NotInjective,
    #[error("match violates the dangling condition")]
    Dangling,
}

/// `G ⇒ H` with its intermediate graph `D`. The track is the identity on
/// the nodes of `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationStep {
    pub rule: Rule,
    pub matching: Morphism,
    pub intermediate: Graph,
    pub comatch: Morphism,
    pub result: Graph,
    pub track: BTreeMap<NodeId, NodeId>,
}

/// First half of a rule application: remove `g(L∖K)` and clear the labels
/// and rootedness the interface leaves undefined.
pub fn delete_phase(rule: &Rule, m: &Morphism, g: &mut Graph) {
    for e in rule.deleted_edges() {
        g.remove_edge(m.edges[&e]).expect("matched edge exists");
    }
    for v in rule.deleted_nodes() {
        g.remove_node(m.nodes[&v]).expect("matched node is isolated");
    }
    for (v, n) in rule.interface.node_entries() {
        let w = m.nodes[&v];
        if n.label.is_none() {
            g.set_label(w, None).unwrap();
        }
        if n.root.is_none() {
            g.set_root(w, None).unwrap();
        }
    }
}

/// Second half: add `R∖K` with fresh ids (ascending R-id order) and
/// restore the cleared labels and rootedness from `R`. Returns the comatch.
pub fn glue_phase(rule: &Rule, m: &Morphism, d: &mut Graph) -> Morphism {
    let mut co = Morphism::default();
    for v in rule.interface.nodes() {
        co.nodes.insert(v, m.nodes[&v]);
    }
    for e in rule.interface.edges() {
        co.edges.insert(e, m.edges[&e]);
    }
    for v in rule.created_nodes() {
        let n = rule.rhs.node(v).unwrap();
        let w = d.add_node(n.label.clone(), n.root);
        co.nodes.insert(v, w);
    }
    for e in rule.created_edges() {
        let ed = rule.rhs.edge(e).unwrap();
        let f = d
            .add_edge(co.nodes[&ed.source], co.nodes[&ed.target], ed.label.clone())
            .unwrap();
        co.edges.insert(e, f);
    }
    for (v, n) in rule.interface.node_entries() {
        let w = co.nodes[&v];
        if n.label.is_none() {
            d.set_label(w, rule.rhs.label(v).cloned()).unwrap();
        }
        if n.root.is_none() {
            d.set_root(w, rule.rhs.root(v)).unwrap();
        }
    }
    co
}

pub fn check_match(rule: &Rule, m: &Morphism, host: &Graph) -> Result<(), ApplyError> {
    if !is_morphism(m, &rule.lhs, host) {
        return Err(ApplyError::NotAMorphism);
    }
    if !is_injective(m) {
        return Err(ApplyError::NotInjective);
    }
    if !satisfies_dangling(rule, m, host) {
        return Err(ApplyError::Dangling);
    }
    Ok(())
}

/// Applies `rule` at `m`, building `D` and then `H`.
pub fn apply(rule: &Rule, m: &Morphism, host: &Graph) -> Result<DerivationStep, ApplyError> {
    check_match(rule, m, host)?;
    let mut d = host.clone();
    delete_phase(rule, m, &mut d);
    let mut h = d.clone();
    let comatch = glue_phase(rule, m, &mut h);
    Ok(DerivationStep {
        rule: rule.clone(),
        matching: m.clone(),
        track: d.nodes().map(|v| (v, v)).collect(),
        intermediate: d,
        comatch,
        result: h,
    })
}

/// Applies `rule` in place, skipping the checks and the copies. The caller
/// guarantees the match is valid.
pub fn apply_in_place(rule: &Rule, m: &Morphism, g: &mut Graph) -> Morphism {
    delete_phase(rule, m, g);
    glue_phase(rule, m, g)
}

/// `H ⇒ G′` by the inverse rule at the comatch.
pub fn invert_step(step: &DerivationStep) -> Result<DerivationStep, ApplyError> {
    apply(&step.rule.invert(), &step.comatch, &step.result)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GtSystem {
    pub alphabet: LabelAlphabet,
    pub rules: Vec<Rule>,
}

impl GtSystem {
    pub fn new(alphabet: LabelAlphabet, rules: Vec<Rule>) -> Self {
        GtSystem { alphabet, rules }
    }

    /// A system whose alphabet is exactly the labels its rules use.
    pub fn from_rules(rules: Vec<Rule>) -> Self {
        let alphabet = rules
            .iter()
            .fold(LabelAlphabet::default(), |a, r| a.union(&r.alphabet()));
        GtSystem { alphabet, rules }
    }

    pub fn invert(&self) -> GtSystem {
        GtSystem {
            alphabet: self.alphabet.clone(),
            rules: self.rules.iter().map(Rule::invert).collect(),
        }
    }

    pub fn normalize(&self) -> GtSystem {
        GtSystem {
            alphabet: self.alphabet.clone(),
            rules: self.rules.iter().map(Rule::normalize).collect(),
        }
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuccessorMode {
    /// Every step, in rule order then match order.
    All,
    /// One step per isomorphism class of results.
    Distinct,
}

/// All valid steps from `g` at `rule`, in match order.
pub fn rule_steps(rule: &Rule, g: &Graph) -> Vec<DerivationStep> {
    find_matches(&rule.lhs, g)
        .into_iter()
        .filter(|m| satisfies_dangling(rule, m, g))
        .map(|m| apply(rule, &m, g).expect("checked match"))
        .collect()
}

pub fn successors(system: &GtSystem, g: &Graph, mode: SuccessorMode) -> Vec<DerivationStep> {
    let mut out = Vec::new();
    let mut seen = IsoSet::new();
    for rule in &system.rules {
        for step in rule_steps(rule, g) {
            if mode == SuccessorMode::Distinct && !seen.insert(step.result.clone()).1 {
                continue;
            }
            out.push(step);
        }
    }
    out
}

/// Result graphs of every step from `g`, up to isomorphism.
pub fn successor_graphs(system: &GtSystem, g: &Graph) -> IsoSet {
    let mut seen = IsoSet::new();
    for rule in &system.rules {
        for step in rule_steps(rule, g) {
            seen.insert(step.result);
        }
    }
    seen
}

pub fn is_normal_form(system: &GtSystem, g: &Graph) -> bool {
    system.rules.iter().all(|r| first_valid_match(r, g).is_none())
}

fn first_valid_match(rule: &Rule, g: &Graph) -> Option<Morphism> {
    let p = Pattern::new(&rule.lhs);
    let deleted: Vec<bool> = p
        .node_ids()
        .iter()
        .map(|v| !rule.interface.contains_node(*v))
        .collect();
    let mut found = None;
    for_each_match(&p, g, p.is_fast(), &mut MatchStats::default(), |a| {
        if assignment_dangling_ok(&p, a, &deleted, g) {
            found = Some(a.to_morphism(&p));
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found
}

#[derive(Clone, Debug)]
pub struct NormalForms {
    pub forms: Vec<Graph>,
    /// The budget ran out before the reachable graphs were exhausted.
    pub truncated: bool,
    pub derivations: u64,
    pub visited: usize,
}

/// Breadth-first search of everything reachable from `g`, up to
/// isomorphism, spending at most `budget` direct derivations.
pub fn normal_forms(system: &GtSystem, g: &Graph, budget: u64) -> NormalForms {
    let mut visited = IsoSet::new();
    visited.insert(g.clone());
    let mut queue = VecDeque::from([g.clone()]);
    let mut forms = Vec::new();
    let mut derivations = 0u64;
    while let Some(x) = queue.pop_front() {
        let mut any = false;
        for rule in &system.rules {
            for step in rule_steps(rule, &x) {
                any = true;
                derivations += 1;
                if derivations > budget {
                    return NormalForms {
                        forms,
                        truncated: true,
                        derivations: budget,
                        visited: visited.len(),
                    };
                }
                if visited.insert(step.result.clone()).1 {
                    queue.push_back(step.result);
                }
            }
        }
        if !any {
            forms.push(x);
        }
    }
    NormalForms {
        forms,
        truncated: false,
        derivations,
        visited: visited.len(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Strategy {
    /// First rule in order with a valid match; least match in id order.
    First,
    /// Uniformly random step, seeded.
    Random(u64),
}

#[derive(Clone, Debug)]
pub struct Derivation {
    pub steps: Vec<DerivationStep>,
    pub result: Graph,
    /// Stopped at `max_steps` rather than at a normal form.
    pub truncated: bool,
}

/// Derives from `g` until a normal form or `max_steps`, keeping every step.
pub fn derive(system: &GtSystem, g: &Graph, strategy: Strategy, max_steps: usize) -> Derivation {
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Strategy::First => None,
    };
    let mut cur = g.clone();
    let mut steps = Vec::new();
    loop {
        if steps.len() >= max_steps {
            let truncated = !is_normal_form(system, &cur);
            return Derivation {
                steps,
                result: cur,
                truncated,
            };
        }
        let next = match &mut rng {
            None => system
                .rules
                .iter()
                .find_map(|r| rule_steps(r, &cur).into_iter().next()),
            Some(rng) => successors(system, &cur, SuccessorMode::All)
                .choose(rng)
                .cloned(),
        };
        match next {
            Some(step) => {
                cur = step.result.clone();
                steps.push(step);
            }
            None => {
                return Derivation {
                    steps,
                    result: cur,
                    truncated: false,
                }
            }
        }
    }
}

/// Rules compiled once for repeated in-place rewriting.
pub struct CompiledSystem<'a> {
    rules: Vec<(&'a Rule, Pattern, Vec<bool>)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GreedyRun {
    pub steps: usize,
    /// Index of the rule used at each step.
    pub trace: Vec<usize>,
    pub stats: MatchStats,
    pub truncated: bool,
}

impl<'a> CompiledSystem<'a> {
    pub fn new(system: &'a GtSystem) -> Self {
        CompiledSystem {
            rules: system
                .rules
                .iter()
                .map(|r| {
                    let p = Pattern::new(&r.lhs);
                    let deleted = p
                        .node_ids()
                        .iter()
                        .map(|v| !r.interface.contains_node(*v))
                        .collect();
                    (r, p, deleted)
                })
                .collect(),
        }
    }

    /// The first valid match, trying rules in order. Fast rules search
    /// from the root index only.
    pub fn first_match(&self, g: &Graph, stats: &mut MatchStats) -> Option<(usize, Morphism)> {
        for (i, (_, p, deleted)) in self.rules.iter().enumerate() {
            let mut found = None;
            for_each_match(p, g, p.is_fast(), stats, |a| {
                if assignment_dangling_ok(p, a, deleted, g) {
                    found = Some(a.to_morphism(p));
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            if let Some(m) = found {
                return Some((i, m));
            }
        }
        None
    }

    /// Rewrites `g` in place with the first-match strategy until a normal
    /// form or `max_steps`.
    pub fn run_greedy(&self, g: &mut Graph, max_steps: usize) -> GreedyRun {
        let mut run = GreedyRun::default();
        while run.steps < max_steps {
            let Some((i, m)) = self.first_match(g, &mut run.stats) else {
                return run;
            };
            apply_in_place(self.rules[i].0, &m, g);
            run.steps += 1;
            run.trace.push(i);
        }
        run.truncated = self.first_match(g, &mut run.stats).is_some();
        run
    }
}
