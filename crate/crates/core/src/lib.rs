//! Rooted double-pushout graph transformation with relabelling.

pub mod bench;
pub mod builtin;
pub mod confluence;
pub mod derivation;
pub mod encoding;
pub mod equivalence;
pub mod format;
pub mod generators;
pub mod grammar;
pub mod graph;
pub mod iso;
pub mod matching;
pub mod morphism;
pub mod random;
pub mod rule;
pub mod symbol;

pub use graph::{EdgeData, EdgeId, Graph, GraphDescription, NodeData, NodeId, Violation};
pub use morphism::Morphism;
pub use rule::{Rule, RuleClass};
pub use symbol::{LabelAlphabet, Symbol};
