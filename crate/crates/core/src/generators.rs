//! Graph classes used for benchmarking, and a direct structural tree test.

use crate::builtin::BOX;
use crate::graph::{Graph, NodeId};
use crate::symbol::Symbol;

fn boxed_nodes(n: u32) -> Graph {
    let b = Symbol::new(BOX);
    let mut g = Graph::new();
    for i in 0..n {
        g.insert_node(NodeId(i), Some(b.clone()), Some(false)).unwrap();
    }
    g
}

fn edge(g: &mut Graph, s: u32, t: u32) {
    g.add_edge(NodeId(s), NodeId(t), Symbol::new(BOX)).unwrap();
}

/// `0 → 1 → … → n-1`.
pub fn gen_linked_list(n: u32) -> Graph {
    let mut g = boxed_nodes(n);
    for i in 1..n {
        edge(&mut g, i - 1, i);
    }
    g
}

/// Heap-indexed: node `i` has children `2i+1` and `2i+2`. `depth` counts
/// edge levels, so there are `2^(depth+1) - 1` nodes.
pub fn gen_perfect_binary_tree(depth: u32) -> Graph {
    let n = (1u32 << (depth + 1)) - 1;
    let mut g = boxed_nodes(n);
    for i in 0..n {
        for c in [2 * i + 1, 2 * i + 2] {
            if c < n {
                edge(&mut g, i, c);
            }
        }
    }
    g
}

/// Node `(i, j)` has id `i*m + j`, with edges `(i,j) → (i,j+1)` and
/// `(i,j) → (i+1,j)` where they exist.
pub fn gen_grid(n: u32, m: u32) -> Graph {
    let mut g = boxed_nodes(n * m);
    for i in 0..n {
        for j in 0..m {
            if j + 1 < m {
                edge(&mut g, i * m + j, i * m + j + 1);
            }
            if i + 1 < n {
                edge(&mut g, i * m + j, (i + 1) * m + j);
            }
        }
    }
    g
}

/// Centre `n` with `n` spokes; even spokes point away from the centre, odd
/// spokes towards it.
pub fn gen_star(n: u32) -> Graph {
    let mut g = boxed_nodes(n + 1);
    for i in 0..n {
        if i % 2 == 0 {
            edge(&mut g, n, i);
        } else {
            edge(&mut g, i, n);
        }
    }
    g
}

/// Non-empty, connected, no undirected cycle, and every node has at most
/// one incoming edge. Labels and rootedness are ignored.
pub fn tree_oracle(g: &Graph) -> bool {
    !g.is_empty()
        && g.nodes().all(|v| g.indegree(v) <= 1)
        && g.is_connected()
        && !g.has_undirected_cycle()
}

/// Every connected component is a tree.
pub fn forest_oracle(g: &Graph) -> bool {
    g.nodes().all(|v| g.indegree(v) <= 1) && !g.has_undirected_cycle()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(gen_linked_list(1).size(), 1);
        let g = gen_grid(2, 2);
        assert_eq!((g.node_count(), g.edge_count()), (4, 4));
        let g = gen_grid(4, 7);
        assert_eq!(g.edge_count(), 2 * 4 * 7 - 4 - 7);
        assert!(g.nodes().all(|v| g.degree(v) <= 4));
        let s = gen_star(8);
        assert_eq!(s.degree(NodeId(8)), 8);
        assert_eq!(s.outdegree(NodeId(8)), 4);
        assert_eq!(gen_perfect_binary_tree(3).node_count(), 15);
    }

    #[test]
    fn oracle_on_classes() {
        assert!(tree_oracle(&gen_linked_list(50)));
        assert!(tree_oracle(&gen_perfect_binary_tree(4)));
        for n in 2..6 {
            assert!(!tree_oracle(&gen_grid(n, n + 1)));
        }
        // a 2-star is a path and a 3-star has centre indegree 1
        assert!(tree_oracle(&gen_star(2)));
        assert!(tree_oracle(&gen_star(3)));
        for n in 4..12 {
            assert!(!tree_oracle(&gen_star(n)));
        }
        let mut two = gen_linked_list(2);
        let a = two.add_node(Some(Symbol::new(BOX)), Some(false));
        let b = two.add_node(Some(Symbol::new(BOX)), Some(false));
        two.add_edge(a, b, Symbol::new(BOX)).unwrap();
        assert!(!tree_oracle(&two));
        assert!(forest_oracle(&two));
        assert!(!tree_oracle(&Graph::new()));
    }

    #[test]
    fn grid_walks() {
        // 3x3: one component, directed acyclic, but undirected cycles
        let g = gen_grid(3, 3);
        assert_eq!(g.component_node_sets().len(), 1);
        assert!(g.is_acyclic());
        assert!(g.has_undirected_cycle());
    }
}
