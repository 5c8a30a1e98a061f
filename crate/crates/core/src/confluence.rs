//! Independence of steps, critical pairs, joinability, and confluence
//! modulo garbage.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::Serialize;

use crate::derivation::{apply, derive, rule_steps, DerivationStep, GtSystem, Strategy};
use crate::encoding::{NONROOT_MARKER, ROOT_MARKER};
use crate::builtin::{BOX, TRI};
use crate::generators::{forest_oracle, tree_oracle};
use crate::graph::{EdgeId, Graph, NodeId};
use crate::iso::IsoSet;
use crate::matching::satisfies_dangling;
use crate::morphism::{is_morphism, Morphism};
use crate::rule::Rule;
use crate::symbol::Symbol;

pub const DEFAULT_LEG_BUDGET: u64 = 200;

/// Images of `L` and of the items the rule leaves untouched. Interface
/// nodes whose label or rootedness the rule changes count as touched.
fn footprint(rule: &Rule, m: &Morphism) -> (BTreeSet<NodeId>, BTreeSet<EdgeId>, BTreeSet<NodeId>, BTreeSet<EdgeId>) {
    let used_n = m.nodes.values().copied().collect();
    let used_e = m.edges.values().copied().collect();
    let kept_n = rule
        .interface
        .node_entries()
        .filter(|(_, n)| n.label.is_some() && n.root.is_some())
        .map(|(v, _)| m.nodes[&v])
        .collect();
    let kept_e = rule.interface.edges().map(|e| m.edges[&e]).collect();
    (used_n, used_e, kept_n, kept_e)
}

/// As [`footprint`] but for the right-hand side under a comatch.
fn co_footprint(rule: &Rule, co: &Morphism) -> (BTreeSet<NodeId>, BTreeSet<EdgeId>, BTreeSet<NodeId>, BTreeSet<EdgeId>) {
    let inv = rule.invert();
    footprint(&inv, co)
}

fn overlap_preserved(
    a: &(BTreeSet<NodeId>, BTreeSet<EdgeId>, BTreeSet<NodeId>, BTreeSet<EdgeId>),
    b: &(BTreeSet<NodeId>, BTreeSet<EdgeId>, BTreeSet<NodeId>, BTreeSet<EdgeId>),
) -> bool {
    a.0.intersection(&b.0).all(|v| a.2.contains(v) && b.2.contains(v))
        && a.1.intersection(&b.1).all(|e| a.3.contains(e) && b.3.contains(e))
}

/// Two matches into the same graph overlap only in items both rules
/// preserve, labels and rootedness included.
pub fn matches_independent(r1: &Rule, m1: &Morphism, r2: &Rule, m2: &Morphism) -> bool {
    overlap_preserved(&footprint(r1, m1), &footprint(r2, m2))
}

/// `G ⇒ H1` and `G ⇒ H2` from the same `G`.
pub fn parallelly_independent(s1: &DerivationStep, s2: &DerivationStep) -> bool {
    matches_independent(&s1.rule, &s1.matching, &s2.rule, &s2.matching)
}

/// `G ⇒ H1 ⇒ H2`: the second step only overlaps what the first preserved.
pub fn sequentially_independent(s1: &DerivationStep, s2: &DerivationStep) -> bool {
    overlap_preserved(&co_footprint(&s1.rule, &s1.comatch), &footprint(&s2.rule, &s2.matching))
}

pub fn track(step: &DerivationStep) -> BTreeMap<NodeId, NodeId> {
    step.track.clone()
}

/// Composite track of consecutive steps; the identity for no steps is
/// left to the caller.
pub fn track_seq(steps: &[DerivationStep]) -> BTreeMap<NodeId, NodeId> {
    let mut it = steps.iter();
    let Some(first) = it.next() else {
        return BTreeMap::new();
    };
    let mut tr = first.track.clone();
    for s in it {
        tr = tr
            .into_iter()
            .filter_map(|(a, b)| s.track.get(&b).map(|c| (a, *c)))
            .collect();
    }
    tr
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Yes,
    /// Every successor of both legs was explored.
    No,
    /// The budget ran out first.
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug)]
pub struct CriticalPair {
    pub rule1: usize,
    pub rule2: usize,
    pub overlap: Graph,
    pub step1: DerivationStep,
    pub step2: DerivationStep,
    pub persistent: BTreeSet<NodeId>,
}

/// Partial injective maps `L2 → L1` that respect labels, rootedness and
/// incidence.
fn identifications(l1: &Graph, l2: &Graph) -> Vec<Morphism> {
    let n2: Vec<NodeId> = l2.nodes().collect();
    let e2: Vec<EdgeId> = l2.edges().collect();
    let mut out = Vec::new();
    let mut cur = Morphism::default();
    fn edges(l1: &Graph, l2: &Graph, e2: &[EdgeId], i: usize, cur: &mut Morphism, out: &mut Vec<Morphism>) {
        let Some(&e) = e2.get(i) else {
            out.push(cur.clone());
            return;
        };
        edges(l1, l2, e2, i + 1, cur, out);
        let d = l2.edge(e).unwrap();
        let (Some(s), Some(t)) = (cur.node(d.source), cur.node(d.target)) else {
            return;
        };
        let cands: Vec<EdgeId> = l1
            .out_edges(s)
            .filter(|f| {
                let fd = l1.edge(*f).unwrap();
                fd.target == t && fd.label == d.label && !cur.edges.values().any(|x| x == f)
            })
            .collect();
        for f in cands {
            cur.edges.insert(e, f);
            edges(l1, l2, e2, i + 1, cur, out);
            cur.edges.remove(&e);
        }
    }
    fn nodes(
        l1: &Graph,
        l2: &Graph,
        n2: &[NodeId],
        e2: &[EdgeId],
        i: usize,
        cur: &mut Morphism,
        out: &mut Vec<Morphism>,
    ) {
        let Some(&v) = n2.get(i) else {
            if !cur.nodes.is_empty() {
                edges(l1, l2, e2, 0, cur, out);
            }
            return;
        };
        nodes(l1, l2, n2, e2, i + 1, cur, out);
        let nv = l2.node(v).unwrap();
        for (w, nw) in l1.node_entries() {
            if nw.label != nv.label || nw.root != nv.root || cur.nodes.values().any(|x| *x == w) {
                continue;
            }
            cur.nodes.insert(v, w);
            nodes(l1, l2, n2, e2, i + 1, cur, out);
            cur.nodes.remove(&v);
        }
    }
    nodes(l1, l2, &n2, &e2, 0, &mut cur, &mut out);
    out
}

/// The overlap `L1 ∪_φ L2` with `g1` the inclusion of `L1`.
fn glue(l1: &Graph, l2: &Graph, phi: &Morphism) -> (Graph, Morphism) {
    let mut h = l1.clone();
    let mut g2 = Morphism::default();
    for (v, n) in l2.node_entries() {
        let w = match phi.node(v) {
            Some(w) => w,
            None => h.add_node(n.label.clone(), n.root),
        };
        g2.nodes.insert(v, w);
    }
    for (e, d) in l2.edge_entries() {
        let f = match phi.edge(e) {
            Some(f) => f,
            None => h
                .add_edge(g2.nodes[&d.source], g2.nodes[&d.target], d.label.clone())
                .unwrap(),
        };
        g2.edges.insert(e, f);
    }
    (h, g2)
}

fn persistent_nodes(h: &Graph, s1: &DerivationStep, s2: &DerivationStep) -> BTreeSet<NodeId> {
    h.nodes()
        .filter(|v| s1.intermediate.contains_node(*v) && s2.intermediate.contains_node(*v))
        .collect()
}

/// Critical pairs of rules `i ≤ j`, in rule order and then enumeration
/// order. For a rule with itself, of two pairs that differ only by
/// swapping the steps the first is kept.
pub fn critical_pairs(t: &GtSystem) -> Vec<CriticalPair> {
    let mut out = Vec::new();
    for (i, r1) in t.rules.iter().enumerate() {
        for (j, r2) in t.rules.iter().enumerate().skip(i) {
            out.extend(pairs_of(i, r1, j, r2));
        }
    }
    out
}

fn pairs_of(i: usize, r1: &Rule, j: usize, r2: &Rule) -> Vec<CriticalPair> {
    let mut out = Vec::new();
    for phi in identifications(&r1.lhs, &r2.lhs) {
        if i == j {
            let inv = phi.inverse();
            if inv < phi {
                continue;
            }
        }
        let (h, g2) = glue(&r1.lhs, &r2.lhs, &phi);
        let g1 = Morphism::identity(&r1.lhs);
        if i == j && g1 == g2 {
            continue;
        }
        if !satisfies_dangling(r1, &g1, &h) || !satisfies_dangling(r2, &g2, &h) {
            continue;
        }
        if matches_independent(r1, &g1, r2, &g2) {
            continue;
        }
        let s1 = apply(r1, &g1, &h).expect("valid overlap match");
        let s2 = apply(r2, &g2, &h).expect("valid overlap match");
        let persistent = persistent_nodes(&h, &s1, &s2);
        out.push(CriticalPair {
            rule1: i,
            rule2: j,
            overlap: h,
            step1: s1,
            step2: s2,
            persistent,
        });
    }
    out
}

/// The unique morphism `k: H → G` with `k∘g1 = m1` and `k∘g2 = m2`, if it
/// exists and is injective.
pub fn embed_pair(cp: &CriticalPair, m1: &Morphism, m2: &Morphism, host: &Graph) -> Option<Morphism> {
    let mut k = Morphism::default();
    for (g, m) in [(&cp.step1.matching, m1), (&cp.step2.matching, m2)] {
        for (v, w) in &g.nodes {
            let img = m.node(*v)?;
            if *k.nodes.entry(*w).or_insert(img) != img {
                return None;
            }
        }
        for (e, f) in &g.edges {
            let img = m.edge(*e)?;
            if *k.edges.entry(*f).or_insert(img) != img {
                return None;
            }
        }
    }
    let inj = k.nodes.values().collect::<BTreeSet<_>>().len() == k.nodes.len()
        && k.edges.values().collect::<BTreeSet<_>>().len() == k.edges.len();
    (inj && is_morphism(&k, &cp.overlap, host)).then_some(k)
}

/// Some pair in `pairs` embeds into the two steps (in either order).
pub fn find_embedding(
    pairs: &[CriticalPair],
    i: usize,
    s1: &DerivationStep,
    j: usize,
    s2: &DerivationStep,
    host: &Graph,
) -> Option<(usize, Morphism)> {
    for (idx, cp) in pairs.iter().enumerate() {
        let tries: [(usize, usize, &DerivationStep, &DerivationStep); 2] = [(i, j, s1, s2), (j, i, s2, s1)];
        for (a, b, x, y) in tries {
            if cp.rule1 == a && cp.rule2 == b {
                if let Some(k) = embed_pair(cp, &x.matching, &y.matching, host) {
                    return Some((idx, k));
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct JoinResult {
    pub joinable: Verdict,
    pub strongly_joinable: Verdict,
    pub derivations: (u64, u64),
    /// A common reduct, when joinable.
    #[serde(skip)]
    pub common: Option<Graph>,
}

struct Leg {
    plain: IsoSet,
    /// States with every persistent node still tracked, persistent nodes
    /// marked so that isomorphism respects the tracks.
    marked: IsoSet,
    truncated: bool,
    derivations: u64,
}

fn mark(g: &Graph, tr: &BTreeMap<usize, NodeId>) -> Graph {
    let mut out = g.clone();
    for (k, v) in tr {
        let l = out.label(*v).map(|l| l.as_str().to_owned()).unwrap_or_default();
        out.set_label(*v, Some(Symbol::from(format!("{l}\u{1}{k}")))).unwrap();
    }
    out
}

fn explore(t: &GtSystem, start: &DerivationStep, persistent: &[NodeId], budget: u64) -> Leg {
    let tr0: BTreeMap<usize, NodeId> = persistent
        .iter()
        .enumerate()
        .filter_map(|(k, v)| start.track.get(v).map(|w| (k, *w)))
        .collect();
    let mut leg = Leg {
        plain: IsoSet::new(),
        marked: IsoSet::new(),
        truncated: false,
        derivations: 0,
    };
    let mut seen = IsoSet::new();
    let mut queue = VecDeque::new();
    seen.insert(mark(&start.result, &tr0));
    queue.push_back((start.result.clone(), tr0));
    while let Some((g, tr)) = queue.pop_front() {
        leg.plain.insert(g.clone());
        if tr.len() == persistent.len() {
            leg.marked.insert(mark(&g, &tr));
        }
        for rule in &t.rules {
            for step in rule_steps(rule, &g) {
                leg.derivations += 1;
                if leg.derivations > budget {
                    leg.truncated = true;
                    leg.derivations = budget;
                    return leg;
                }
                let tr2: BTreeMap<usize, NodeId> = tr
                    .iter()
                    .filter_map(|(k, v)| step.track.get(v).map(|w| (*k, *w)))
                    .collect();
                if seen.insert(mark(&step.result, &tr2)).1 {
                    queue.push_back((step.result, tr2));
                }
            }
        }
    }
    leg
}

/// Searches both legs breadth first, spending at most `budget`
/// derivations on each.
pub fn join(cp: &CriticalPair, t: &GtSystem, budget: u64) -> JoinResult {
    let persistent: Vec<NodeId> = cp.persistent.iter().copied().collect();
    let a = explore(t, &cp.step1, &persistent, budget);
    let b = explore(t, &cp.step2, &persistent, budget);
    let exhausted = !a.truncated && !b.truncated;
    let miss = if exhausted { Verdict::No } else { Verdict::Unknown };
    let common = b.plain.iter().find(|g| a.plain.contains(g)).cloned();
    let strong = b.marked.iter().any(|g| a.marked.contains(g));
    JoinResult {
        joinable: if common.is_some() { Verdict::Yes } else { miss },
        strongly_joinable: if strong { Verdict::Yes } else { miss },
        derivations: (a.derivations, b.derivations),
        common,
    }
}

pub fn joinable(cp: &CriticalPair, t: &GtSystem, budget: u64) -> Verdict {
    join(cp, t, budget).joinable
}

pub fn strongly_joinable(cp: &CriticalPair, t: &GtSystem, budget: u64) -> Verdict {
    join(cp, t, budget).strongly_joinable
}

/// [`join`] for every pair on `jobs` threads; results in input order.
pub fn join_all(pairs: &[CriticalPair], t: &GtSystem, budget: u64, jobs: usize) -> Vec<JoinResult> {
    let next = AtomicUsize::new(0);
    let results = Mutex::new(vec![None; pairs.len()]);
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, pairs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cp) = pairs.get(i) else { break };
                let r = join(cp, t, budget);
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every pair analysed"))
        .collect()
}

type Pred = Arc<dyn Fn(&Graph) -> bool + Send + Sync>;

/// A set `D` of good graphs, with a test for its subgraph closure.
#[derive(Clone)]
pub struct GarbagePredicate {
    pub name: String,
    member: Pred,
    closure: Pred,
}

impl fmt::Debug for GarbagePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GarbagePredicate({})", self.name)
    }
}

impl GarbagePredicate {
    pub fn new(
        name: impl Into<String>,
        member: impl Fn(&Graph) -> bool + Send + Sync + 'static,
        closure: impl Fn(&Graph) -> bool + Send + Sync + 'static,
    ) -> Self {
        GarbagePredicate {
            name: name.into(),
            member: Arc::new(member),
            closure: Arc::new(closure),
        }
    }

    pub fn member(&self, g: &Graph) -> bool {
        (self.member)(g)
    }

    pub fn closure_member(&self, g: &Graph) -> bool {
        (self.closure)(g)
    }

    pub fn all_graphs() -> Self {
        GarbagePredicate::new("all", |_| true, |_| true)
    }

    /// Trees; the closure is the forests.
    pub fn trees() -> Self {
        GarbagePredicate::new("trees", tree_oracle, forest_oracle)
    }

    pub fn acyclic() -> Self {
        GarbagePredicate::new("acyclic", |g| g.is_acyclic(), |g| g.is_acyclic())
    }

    /// Every directed cycle contains a `t` edge.
    pub fn t_edge_cycle() -> Self {
        let f = |g: &Graph| g.is_acyclic_filtered(|e| e.label.as_str() != "t");
        GarbagePredicate::new("t-edge-cycle", f, f)
    }

    /// Trees during tree recognition: labels box and tri, box edges, one
    /// root. The closure drops connectivity and allows no root.
    pub fn rooted_trees() -> Self {
        let ok = |g: &Graph| {
            g.node_entries().all(|(_, n)| {
                matches!(n.label.as_ref().map(|l| l.as_str()), Some(BOX) | Some(TRI)) && n.root.is_some()
            }) && g.edge_entries().all(|(_, d)| d.label.as_str() == BOX)
        };
        GarbagePredicate::new(
            "rooted-trees",
            move |g| ok(g) && g.roots().len() == 1 && tree_oracle(g),
            move |g| ok(g) && g.roots().len() <= 1 && forest_oracle(g),
        )
    }

    /// Encodings of tree recognition states: every node box with one
    /// marker loop, exactly one `R`, tri edges forming a tree. The closure
    /// allows missing markers, at most one `R`, and a forest.
    pub fn encoded_input_tree() -> Self {
        GarbagePredicate::new(
            "encoded-input-tree",
            |g| encoded_shape(g, true),
            |g| encoded_shape(g, false),
        )
    }

    pub fn builtin(name: &str) -> Option<Self> {
        Some(match name {
            "all" => Self::all_graphs(),
            "trees" | "forests" => Self::trees(),
            "acyclic" => Self::acyclic(),
            "t-edge-cycle" => Self::t_edge_cycle(),
            "rooted-trees" => Self::rooted_trees(),
            "encoded-input-tree" => Self::encoded_input_tree(),
            _ => return None,
        })
    }

    pub const BUILTIN: [&'static str; 6] = [
        "all",
        "trees",
        "acyclic",
        "t-edge-cycle",
        "rooted-trees",
        "encoded-input-tree",
    ];
}

fn encoded_shape(g: &Graph, total: bool) -> bool {
    let mut structure = Graph::new();
    let mut roots = 0;
    for (v, n) in g.node_entries() {
        if n.label.as_ref().map(|l| l.as_str()) != Some(BOX) {
            return false;
        }
        structure.insert_node(v, None, None).unwrap();
        let mut markers = 0;
        for e in g.out_edges(v) {
            let d = g.edge(e).unwrap();
            if d.target != v {
                continue;
            }
            match d.label.as_str() {
                ROOT_MARKER => roots += 1,
                NONROOT_MARKER | "M" => {}
                _ => return false,
            }
            markers += 1;
        }
        if markers > 1 || (total && markers != 1) {
            return false;
        }
    }
    for (_, d) in g.edge_entries() {
        if d.source != d.target {
            if d.label.as_str() != TRI {
                return false;
            }
            structure.add_edge(d.source, d.target, d.label.clone()).unwrap();
        }
    }
    if total {
        roots == 1 && tree_oracle(&structure)
    } else {
        roots <= 1 && forest_oracle(&structure)
    }
}

/// Pairs whose overlap lies in the closure of `D`.
pub fn non_garbage_pairs(t: &GtSystem, d: &GarbagePredicate) -> Vec<CriticalPair> {
    critical_pairs(t)
        .into_iter()
        .filter(|cp| d.closure_member(&cp.overlap))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    pub trials: usize,
    pub successors_checked: usize,
    /// Samples the sampler produced outside `D`; they are skipped.
    pub rejected_samples: usize,
    #[serde(skip)]
    pub counterexample: Option<(Graph, String, Graph)>,
}

impl SeparationReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Falsifier for weak garbage separation: samples `G ∈ D` and checks every
/// direct successor is in `D` too.
pub fn check_weak_garbage_separation(
    t: &GtSystem,
    d: &GarbagePredicate,
    mut sampler: impl FnMut(&mut ChaCha8Rng) -> Graph,
    trials: usize,
    seed: u64,
) -> SeparationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SeparationReport {
        trials,
        successors_checked: 0,
        rejected_samples: 0,
        counterexample: None,
    };
    for _ in 0..trials {
        let g = sampler(&mut rng);
        if !d.member(&g) {
            rep.rejected_samples += 1;
            continue;
        }
        for rule in &t.rules {
            for step in rule_steps(rule, &g) {
                rep.successors_checked += 1;
                if !d.member(&step.result) {
                    rep.counterexample = Some((g, rule.name.clone(), step.result));
                    return rep;
                }
            }
        }
    }
    rep
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    Inconclusive,
    LocallyConfluentModuloGarbage,
    LocallyConfluent,
    Confluent,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conclusion::Inconclusive => "inconclusive",
            Conclusion::LocallyConfluentModuloGarbage => "locally confluent modulo garbage",
            Conclusion::LocallyConfluent => "locally confluent",
            Conclusion::Confluent => "confluent",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub index: usize,
    pub rule1: String,
    pub rule2: String,
    pub overlap_nodes: usize,
    pub overlap_edges: usize,
    pub persistent: Vec<NodeId>,
    pub garbage: bool,
    pub joinable: Verdict,
    pub strongly_joinable: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfluenceReport {
    pub predicate: String,
    pub pairs: Vec<PairReport>,
    pub critical_pairs: usize,
    pub non_garbage: usize,
    pub strongly_joinable: usize,
    pub strongly_joinable_non_garbage: usize,
    pub conclusion: Conclusion,
    /// Index of a critical pair shown not joinable: a concrete failure of
    /// local confluence.
    pub not_locally_confluent: Option<usize>,
    /// Confluence modulo garbage backed by sampled termination and
    /// separation checks, if those were run and passed.
    pub evidence: Option<String>,
    pub justification: Vec<String>,
}

pub struct ReportOptions<'a> {
    pub budget: u64,
    pub jobs: usize,
    /// Draws members of `D` for the sampled termination and separation
    /// checks.
    pub sampler: Option<Box<dyn FnMut(&mut ChaCha8Rng) -> Graph + 'a>>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for ReportOptions<'_> {
    fn default() -> Self {
        ReportOptions {
            budget: DEFAULT_LEG_BUDGET,
            jobs: 1,
            sampler: None,
            trials: 100,
            seed: 0,
        }
    }
}

/// Critical pairs with verdicts, plus the strongest conclusion they
/// support.
pub fn confluence_mod_garbage_report(
    t: &GtSystem,
    d: &GarbagePredicate,
    mut opts: ReportOptions<'_>,
) -> (ConfluenceReport, Vec<CriticalPair>, Vec<JoinResult>) {
    let pairs = critical_pairs(t);
    let results = join_all(&pairs, t, opts.budget, opts.jobs);
    let mut rows = Vec::new();
    for (i, (cp, r)) in pairs.iter().zip(&results).enumerate() {
        rows.push(PairReport {
            index: i,
            rule1: t.rules[cp.rule1].name.clone(),
            rule2: t.rules[cp.rule2].name.clone(),
            overlap_nodes: cp.overlap.node_count(),
            overlap_edges: cp.overlap.edge_count(),
            persistent: cp.persistent.iter().copied().collect(),
            garbage: !d.closure_member(&cp.overlap),
            joinable: r.joinable,
            strongly_joinable: r.strongly_joinable,
        });
    }
    let strong = rows.iter().filter(|r| r.strongly_joinable == Verdict::Yes).count();
    let ng: Vec<&PairReport> = rows.iter().filter(|r| !r.garbage).collect();
    let strong_ng = ng.iter().filter(|r| r.strongly_joinable == Verdict::Yes).count();
    let not_lc = rows.iter().find(|r| r.joinable == Verdict::No).map(|r| r.index);
    let mut why = Vec::new();
    why.push(format!(
        "{} critical pairs, {} strongly joinable; {} non-garbage under `{}`, {} of them strongly joinable",
        rows.len(),
        strong,
        ng.len(),
        d.name,
        strong_ng
    ));
    let conclusion = if t.rules.is_empty() {
        why.push("no rules, so no derivations".into());
        Conclusion::Confluent
    } else if strong == rows.len() {
        why.push("all critical pairs strongly joinable, hence locally confluent".into());
        Conclusion::LocallyConfluent
    } else if strong_ng == ng.len() {
        why.push("all non-garbage critical pairs strongly joinable, hence locally confluent modulo garbage".into());
        Conclusion::LocallyConfluentModuloGarbage
    } else {
        why.push(format!(
            "{} non-garbage pairs not shown strongly joinable",
            ng.len() - strong_ng
        ));
        Conclusion::Inconclusive
    };
    if let Some(i) = not_lc {
        why.push(format!("pair {i} is not joinable, so the system is not locally confluent"));
    }
    let mut evidence = None;
    if let (Some(sampler), true) = (opts.sampler.as_mut(), conclusion >= Conclusion::LocallyConfluentModuloGarbage) {
        let mut samples = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.trials {
            samples.push(sampler(&mut rng));
        }
        let mut k = 0;
        let sep = check_weak_garbage_separation(
            t,
            d,
            |_| {
                k += 1;
                samples[k - 1].clone()
            },
            samples.len(),
            opts.seed,
        );
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let terminated = samples.iter().all(|g| {
            let cap = 4 * (g.size() + 8);
            !derive(t, g, Strategy::Random(rng.gen()), cap).truncated
        });
        why.push(format!(
            "sampled {} members of D: weak separation {}, termination {}",
            samples.len(),
            if sep.holds() { "not refuted" } else { "refuted" },
            if terminated { "observed" } else { "not observed" }
        ));
        if sep.holds() && terminated {
            evidence = Some("confluent modulo garbage (evidence-based)".into());
        }
    }
    let report = ConfluenceReport {
        predicate: d.name.clone(),
        critical_pairs: rows.len(),
        non_garbage: ng.len(),
        strongly_joinable: strong,
        strongly_joinable_non_garbage: strong_ng,
        pairs: rows,
        conclusion,
        not_locally_confluent: not_lc,
        evidence,
        justification: why,
    };
    (report, pairs, results)
}
