//! Systems and grammars shipped with the library.

use crate::derivation::GtSystem;
use crate::format::{parse_graph, parse_rules};
use crate::grammar::Grammar;
use crate::graph::Graph;
use crate::rule::Rule;
use crate::symbol::{LabelAlphabet, Symbol};

pub const TREE_RECOGNITION: &str = include_str!("../data/tree-recognition.rule");
pub const TREE_GRAMMAR: &str = include_str!("../data/tree-grammar.rule");
pub const ENCODED_TREE: &str = include_str!("../data/encoded-tree.rule");
pub const EFD_RULES: &str = include_str!("../data/efd.rule");
pub const EFD_START: &str = include_str!("../data/efd-start.graph");

pub const BOX: &str = "box";
pub const TRI: &str = "tri";

fn rules(text: &str) -> Vec<Rule> {
    parse_rules(text).expect("built-in rules parse")
}

/// `r0, r1, r2` over `({box, tri}, {box})`.
pub fn tree_recognition_system() -> GtSystem {
    GtSystem::new(LabelAlphabet::new([BOX, TRI], [BOX]), rules(TREE_RECOGNITION))
}

/// The TREE grammar: a single box node, and a rule that hangs a new leaf
/// below any node.
pub fn tree_grammar() -> Grammar {
    let mut start = Graph::new();
    start.add_node(Some(Symbol::new(BOX)), Some(false));
    Grammar::new(
        GtSystem::new(LabelAlphabet::new([BOX], [BOX]), rules(TREE_GRAMMAR)),
        start,
    )
    .with_tree_shortcut()
}

/// The encoded tree recognition rules `e0, e1, e2` as drawn, for comparison
/// with the output of the rooted encoder.
pub fn encoded_tree_reference() -> GtSystem {
    GtSystem::new(
        LabelAlphabet::new([BOX], ["R", "N", "M", TRI]),
        rules(ENCODED_TREE),
    )
}

/// Extended flow diagrams in the generating direction.
pub fn efd_grammar() -> Grammar {
    let (_, start) = parse_graph(EFD_START).expect("built-in graph parses");
    Grammar::new(
        GtSystem::new(
            LabelAlphabet::new(["dot", BOX, "diamond"], ["t", "f", "e"]),
            rules(EFD_RULES),
        ),
        start,
    )
}

/// The reduction system `EFD⁻¹`.
pub fn efd_reduction_system() -> GtSystem {
    efd_grammar().system.invert()
}
