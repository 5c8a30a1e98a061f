//! Equivalence of rule sets: by rule isomorphism, after normalisation, or
//! by comparing one-step successors on every small graph.

use std::fmt;

use serde::Serialize;

use crate::derivation::{successor_graphs, GtSystem};
use crate::graph::{Graph, NodeId};
use crate::iso::{are_isomorphic, IsoSet};
use crate::rule::{rules_isomorphic, Rule};
use crate::symbol::{LabelAlphabet, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "bound")]
pub enum EquivalenceMode {
    Iso,
    Normalisation,
    /// Successor sets agree on every TLRG with at most this many nodes plus
    /// edges.
    Stepwise(usize),
}

impl fmt::Display for EquivalenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquivalenceMode::Iso => f.write_str("iso"),
            EquivalenceMode::Normalisation => f.write_str("normalisation"),
            EquivalenceMode::Stepwise(b) => write!(f, "stepwise({b})"),
        }
    }
}

impl std::str::FromStr for EquivalenceMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "iso" => Ok(EquivalenceMode::Iso),
            "normalisation" | "normalization" => Ok(EquivalenceMode::Normalisation),
            other => other
                .strip_prefix("stepwise(")
                .and_then(|r| r.strip_suffix(')'))
                .or_else(|| other.strip_prefix("stepwise:"))
                .and_then(|b| b.trim().parse().ok())
                .map(EquivalenceMode::Stepwise)
                .ok_or_else(|| format!("unknown equivalence mode `{other}`")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceResult {
    pub mode: EquivalenceMode,
    pub equivalent: bool,
    /// Set for step-wise checks: the verdict only covers graphs up to this
    /// size.
    pub bounded: Option<usize>,
    pub graphs_checked: usize,
    #[serde(skip)]
    pub witness: Option<Graph>,
}

impl fmt::Display for EquivalenceResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = if self.equivalent { "equivalent" } else { "not equivalent" };
        match self.bounded {
            Some(b) if self.equivalent => write!(f, "{word} (bounded: all graphs of size <= {b})"),
            _ => f.write_str(word),
        }
    }
}

/// Same multiset of rule classes, ignoring multiplicity.
fn same_classes(a: &[Rule], b: &[Rule], eq: impl Fn(&Rule, &Rule) -> bool) -> bool {
    a.iter().all(|r| b.iter().any(|s| eq(r, s))) && b.iter().all(|s| a.iter().any(|r| eq(r, s)))
}

pub fn systems_equivalent(t1: &GtSystem, t2: &GtSystem, mode: EquivalenceMode) -> EquivalenceResult {
    let mut res = EquivalenceResult {
        mode,
        equivalent: false,
        bounded: None,
        graphs_checked: 0,
        witness: None,
    };
    match mode {
        EquivalenceMode::Iso => res.equivalent = same_classes(&t1.rules, &t2.rules, rules_isomorphic),
        EquivalenceMode::Normalisation => {
            let (n1, n2) = (t1.normalize(), t2.normalize());
            res.equivalent = same_classes(&n1.rules, &n2.rules, rules_isomorphic);
        }
        EquivalenceMode::Stepwise(bound) => {
            res.bounded = Some(bound);
            res.equivalent = true;
            let alphabet = t1.alphabet.union(&t2.alphabet);
            for g in enumerate_tlrgs(&alphabet, bound) {
                res.graphs_checked += 1;
                if !same_successors(t1, t2, &g) {
                    res.equivalent = false;
                    res.witness = Some(g);
                    break;
                }
            }
        }
    }
    res
}

fn same_successors(t1: &GtSystem, t2: &GtSystem, g: &Graph) -> bool {
    let (a, b) = (successor_graphs(t1, g), successor_graphs(t2, g));
    a.len() == b.len() && a.iter().all(|h| b.contains(h))
}

/// Every totally labelled and rooted graph over the alphabet's terminal and
/// non-terminal labels with `nodes + edges <= bound`, one per isomorphism
/// class.
pub fn enumerate_tlrgs(alphabet: &LabelAlphabet, bound: usize) -> Vec<Graph> {
    let node_kinds: Vec<(Symbol, bool)> = alphabet
        .node_labels
        .iter()
        .flat_map(|l| [(l.clone(), false), (l.clone(), true)])
        .collect();
    let edge_labels: Vec<Symbol> = alphabet.edge_labels.iter().cloned().collect();
    let mut out = IsoSet::new();
    out.insert(Graph::new());
    if node_kinds.is_empty() {
        return out.into_vec();
    }
    for n in 1..=bound {
        // Node kinds in non-decreasing order: any graph is isomorphic to one
        // whose node ids are sorted by kind.
        let mut kinds = vec![0usize; n];
        loop {
            let mut base = Graph::new();
            for &k in &kinds {
                let (l, r) = &node_kinds[k];
                base.add_node(Some(l.clone()), Some(*r));
            }
            let slots: Vec<(NodeId, NodeId, Symbol)> = (0..n as u32)
                .flat_map(|s| (0..n as u32).map(move |t| (NodeId(s), NodeId(t))))
                .flat_map(|(s, t)| edge_labels.iter().map(move |l| (s, t, l.clone())))
                .collect();
            add_edge_multisets(&base, &slots, 0, bound - n, &mut out);
            if !next_nondecreasing(&mut kinds, node_kinds.len()) {
                break;
            }
        }
    }
    out.into_vec()
}

fn add_edge_multisets(
    g: &Graph,
    slots: &[(NodeId, NodeId, Symbol)],
    from: usize,
    room: usize,
    out: &mut IsoSet,
) {
    if !out.contains(g) {
        out.insert(g.clone());
    }
    if room == 0 {
        return;
    }
    for i in from..slots.len() {
        let (s, t, l) = &slots[i];
        let mut h = g.clone();
        h.add_edge(*s, *t, l.clone()).unwrap();
        add_edge_multisets(&h, slots, i, room - 1, out);
    }
}

fn next_nondecreasing(v: &mut [usize], k: usize) -> bool {
    let mut i = v.len();
    while i > 0 {
        i -= 1;
        if v[i] + 1 < k {
            let x = v[i] + 1;
            for y in &mut v[i..] {
                *y = x;
            }
            return true;
        }
    }
    false
}

/// Whether the rule and its normal form produce the same successors of `g`.
pub fn normal_form_agrees(rule: &Rule, g: &Graph) -> bool {
    let a = GtSystem::from_rules(vec![rule.clone()]);
    let b = GtSystem::from_rules(vec![rule.normalize()]);
    let (x, y) = (successor_graphs(&a, g), successor_graphs(&b, g));
    x.len() == y.len() && x.iter().all(|h| y.iter().any(|k| are_isomorphic(h, k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_rule;

    fn rule(src: &str) -> Rule {
        parse_rule(src).unwrap_or_else(|e| panic!("{e}"))
    }

    const R1: &str = "rule r1 {
        left { node 1 label=box root=0 node 2 label=tri root=0
               edge 1 1 -> 2 label=tri edge 2 1 -> 1 label=box }
        interface { node 1 label=box root=0 edge 2 1 -> 1 label=box }
        right { node 1 label=box root=0 edge 2 1 -> 1 label=box } }";
    const R2: &str = "rule r2 {
        left { node 7 label=box root=0 node 4 label=tri root=0
               edge 5 7 -> 7 label=box edge 3 7 -> 4 label=tri }
        interface { node 7 label=box root=0 edge 5 7 -> 7 label=box }
        right { node 7 label=box root=0 edge 5 7 -> 7 label=box } }";
    const R3: &str = "rule r3 {
        left { node 1 label=box root=0 node 2 label=tri root=0
               edge 1 1 -> 2 label=tri edge 2 1 -> 1 label=box }
        interface { node 1 label=box root=0 }
        right { node 1 label=box root=0 } }";
    const R1_NORMAL: &str = "rule r1n {
        left { node 1 label=box root=0 node 2 label=tri root=0
               edge 1 1 -> 2 label=tri edge 2 1 -> 1 label=box }
        interface { node 1 }
        right { node 1 label=box root=0 edge 3 1 -> 1 label=box } }";

    fn system(srcs: &[&str]) -> GtSystem {
        GtSystem::new(
            LabelAlphabet::new(["a"], ["x"]),
            srcs.iter().map(|s| rule(s)).collect(),
        )
    }

    const KEEP: &str = "rule k { left { node 1 label=a root=0 } interface { node 1 label=a root=0 }
        right { node 1 label=a root=0 } }";
    const RECREATE: &str = "rule c { left { node 1 label=a root=0 } interface { }
        right { node 2 label=a root=0 } }";
    const LOOP_KEPT: &str = "rule l { left { node 1 label=a root=0 edge 1 1 -> 1 label=x }
        interface { node 1 label=a root=0 edge 1 1 -> 1 label=x }
        right { node 1 label=a root=0 edge 1 1 -> 1 label=x } }";
    const LOOP_REBUILT: &str = "rule m { left { node 1 label=a root=0 edge 1 1 -> 1 label=x }
        interface { node 1 label=a root=0 }
        right { node 1 label=a root=0 edge 2 1 -> 1 label=x } }";

    #[test]
    fn rule_isomorphism_examples() {
        let (r1, r2, r3) = (rule(R1), rule(R2), rule(R3));
        assert!(rules_isomorphic(&r1, &r2));
        assert!(!rules_isomorphic(&r1, &r3));
        assert!(!rules_isomorphic(&r2, &r3));
        assert!(rules_isomorphic(&r1.normalize(), &rule(R1_NORMAL)));
    }

    #[test]
    fn hierarchy_is_strict() {
        let (a, b) = (system(&[LOOP_KEPT]), system(&[LOOP_REBUILT]));
        assert!(!systems_equivalent(&a, &b, EquivalenceMode::Iso).equivalent);
        assert!(systems_equivalent(&a, &b, EquivalenceMode::Normalisation).equivalent);

        let (c, d) = (system(&[KEEP]), system(&[KEEP, RECREATE]));
        assert!(!systems_equivalent(&c, &d, EquivalenceMode::Normalisation).equivalent);
        for bound in 0..=4 {
            let r = systems_equivalent(&c, &d, EquivalenceMode::Stepwise(bound));
            assert!(r.equivalent, "bound {bound}");
            assert_eq!(r.bounded, Some(bound));
            assert!(r.to_string().contains("bounded"));
        }
    }

    #[test]
    fn a_system_equals_itself() {
        let t = crate::builtin::tree_recognition_system();
        for mode in [EquivalenceMode::Iso, EquivalenceMode::Normalisation, EquivalenceMode::Stepwise(3)] {
            assert!(systems_equivalent(&t, &t, mode).equivalent, "{mode}");
        }
    }

    #[test]
    fn normal_form_has_the_same_steps() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let spec = crate::random::RandomSpec::default();
        for i in 0..100 {
            let r = crate::random::random_rule(&mut rng, &spec, &format!("r{i}"));
            let g = crate::random::random_host_for(&mut rng, &spec, &r, 6);
            assert!(normal_form_agrees(&r, &g), "{}", crate::format::print_rule(&r));
        }
    }

    #[test]
    fn enumeration_counts() {
        let a = LabelAlphabet::new(["a"], ["x"]);
        // size 0: empty; size 1: two single nodes (rooted or not).
        assert_eq!(enumerate_tlrgs(&a, 1).len(), 3);
        // size 2: adds two-node graphs (3 root patterns) and loops (2).
        assert_eq!(enumerate_tlrgs(&a, 2).len(), 8);
    }

    #[test]
    fn parse_modes() {
        assert_eq!("stepwise(3)".parse::<EquivalenceMode>().unwrap(), EquivalenceMode::Stepwise(3));
        assert_eq!("iso".parse::<EquivalenceMode>().unwrap(), EquivalenceMode::Iso);
        assert!("stepwise".parse::<EquivalenceMode>().is_err());
    }

    #[test]
    fn adding_a_node_differs_from_doing_nothing() {
        let t1 = GtSystem::from_rules(vec![rule("rule a { left { } interface { } right { } }")]);
        let t2 = GtSystem::from_rules(vec![rule(
            "rule b { left { } interface { } right { node 1 label=a root=0 } }",
        )]);
        let r = systems_equivalent(&t1, &t2, EquivalenceMode::Stepwise(2));
        assert!(!r.equivalent);
        assert_eq!(r.witness.unwrap().node_count(), 0);
    }
}
