use std::borrow::Borrow;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

/// An interned-by-sharing label symbol. Cloning is a reference count bump.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(s: &str) -> Self {
        Symbol(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Self {
        Symbol(Arc::from(s))
    }
}

impl Borrow<str> for Symbol {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

/// Node and edge label sets, each with a designated non-terminal subset.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LabelAlphabet {
    pub node_labels: BTreeSet<Symbol>,
    pub edge_labels: BTreeSet<Symbol>,
    pub nonterminal_nodes: BTreeSet<Symbol>,
    pub nonterminal_edges: BTreeSet<Symbol>,
}

impl LabelAlphabet {
    pub fn new<N, E>(node_labels: N, edge_labels: E) -> Self
    where
        N: IntoIterator,
        N::Item: Into<Symbol>,
        E: IntoIterator,
        E::Item: Into<Symbol>,
    {
        LabelAlphabet {
            node_labels: node_labels.into_iter().map(Into::into).collect(),
            edge_labels: edge_labels.into_iter().map(Into::into).collect(),
            nonterminal_nodes: BTreeSet::new(),
            nonterminal_edges: BTreeSet::new(),
        }
    }

    pub fn with_nonterminals<N, E>(mut self, nodes: N, edges: E) -> Self
    where
        N: IntoIterator,
        N::Item: Into<Symbol>,
        E: IntoIterator,
        E::Item: Into<Symbol>,
    {
        self.nonterminal_nodes = nodes.into_iter().map(Into::into).collect();
        self.nonterminal_edges = edges.into_iter().map(Into::into).collect();
        self
    }

    /// Non-terminal sets must be subsets of their alphabets.
    pub fn is_well_formed(&self) -> bool {
        self.nonterminal_nodes.is_subset(&self.node_labels)
            && self.nonterminal_edges.is_subset(&self.edge_labels)
    }

    pub fn union(&self, other: &LabelAlphabet) -> LabelAlphabet {
        LabelAlphabet {
            node_labels: self.node_labels.union(&other.node_labels).cloned().collect(),
            edge_labels: self.edge_labels.union(&other.edge_labels).cloned().collect(),
            nonterminal_nodes: self
                .nonterminal_nodes
                .union(&other.nonterminal_nodes)
                .cloned()
                .collect(),
            nonterminal_edges: self
                .nonterminal_edges
                .union(&other.nonterminal_edges)
                .cloned()
                .collect(),
        }
    }
}
