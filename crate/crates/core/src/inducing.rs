//! Primitive inducing paths and maximisation.

use std::collections::VecDeque;

use crate::classes::is_chain_mixed;
use crate::error::{Error, Result};
use crate::graph::{Mark, MixedGraph};
use crate::separation::separated_unchecked;

/// A path `i, q1, .., qn, j` with `n >= 1`, every `q` in `ant({i, j})`,
/// interior edges bidirected or undirected, and each terminal edge either
/// bidirected or directed out of its endpoint. Returns the shortest one.
pub fn primitive_inducing_path(g: &MixedGraph, i: usize, j: usize) -> Option<Vec<usize>> {
    if i == j {
        return None;
    }
    let ant = g.ant_mask(&[i, j]);
    let interior = |q: usize| q != i && q != j && ant[q];
    // terminal edge at endpoint x: x <-> q or x --> q
    let terminal = |x: usize, q: usize| matches!(g.marks(x, q), Some((_, Mark::Head)));

    let n = g.n();
    let mut prev = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for a in g.adj(i) {
        if interior(a.node) && terminal(i, a.node) {
            seen[a.node] = true;
            queue.push_back(a.node);
        }
    }
    while let Some(q) = queue.pop_front() {
        if terminal(j, q) {
            let mut path = vec![j, q];
            let mut c = q;
            while prev[c] != usize::MAX {
                c = prev[c];
                path.push(c);
            }
            path.push(i);
            path.reverse();
            return Some(path);
        }
        for a in g.adj(q) {
            let interior_edge = a.near == a.far;
            if interior_edge && !seen[a.node] && interior(a.node) {
                seen[a.node] = true;
                prev[a.node] = q;
                queue.push_back(a.node);
            }
        }
    }
    None
}

/// The marks an edge between `i` and `j` gets from anterior relations:
/// tail at an endpoint exactly when it is anterior to the other.
pub(crate) fn marks_from_anteriors(i_in_ant_j: bool, j_in_ant_i: bool) -> (Mark, Mark) {
    let mark = |tail: bool| if tail { Mark::Tail } else { Mark::Head };
    (mark(i_in_ant_j), mark(j_in_ant_i))
}

/// Whether no set of nodes separates the non-adjacent pair `i`, `j`. In a
/// chain mixed graph a separable pair is separated by its anterior set
/// `ant({i, j})`, so that set is the only one tried.
pub fn inseparable(g: &MixedGraph, i: usize, j: usize) -> bool {
    let mut z = g.ant_mask(&[i, j]);
    z[i] = false;
    z[j] = false;
    !separated_unchecked(g, i, j, &z)
}

/// Adds edges between non-adjacent pairs that no set separates until none
/// remain. A primitive inducing path certifies such a pair; pairs whose
/// connecting walks vary with the conditioning set are caught by the
/// anterior-set test.
pub fn maximize(g: &MixedGraph) -> Result<MixedGraph> {
    if !is_chain_mixed(g) {
        return Err(Error::NotChainMixed);
    }
    let n = g.n();
    let ant: Vec<Vec<bool>> = (0..n).map(|i| g.ant_mask(&[i])).collect();
    let mut out = g.clone();
    loop {
        let mut added = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if !out.adjacent(i, j) && (primitive_inducing_path(&out, i, j).is_some() || inseparable(&out, i, j)) {
                    added.push((i, j));
                }
            }
        }
        if added.is_empty() {
            return Ok(out);
        }
        for (i, j) in added {
            let (mi, mj) = marks_from_anteriors(ant[j][i], ant[i][j]);
            out.set_edge(i, j, mi, mj);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeKind::{self, *};

    fn g(labels: &[&str], edges: &[(&str, &str, EdgeKind)]) -> MixedGraph {
        MixedGraph::build(labels, edges).unwrap()
    }

    fn six_node() -> MixedGraph {
        g(
            &["1", "2", "3", "4", "5", "6"],
            &[
                ("1", "2", Bidirected),
                ("2", "3", Bidirected),
                ("3", "4", Bidirected),
                ("2", "5", Directed),
                ("5", "4", Directed),
                ("3", "6", Directed),
                ("6", "1", Directed),
            ],
        )
    }

    #[test]
    fn six_node_example_has_a_witness() {
        let x = six_node();
        let p = primitive_inducing_path(&x, 0, 3).unwrap();
        assert_eq!(x.labels_of(&p), ["1", "2", "3", "4"]);
        let m = maximize(&x).unwrap();
        assert_eq!(m.edge_kind(0, 3), Some(Bidirected));
        assert_eq!(m.num_edges(), x.num_edges() + 1);
    }

    #[test]
    fn directed_interior_edge_is_not_inducing() {
        let x = g(&["1", "2", "3"], &[("1", "2", Directed), ("2", "3", Directed)]);
        assert!(primitive_inducing_path(&x, 0, 2).is_none());
        assert_eq!(maximize(&x).unwrap(), x);
    }

    #[test]
    fn interior_node_must_be_anterior() {
        // 1 <-> 2 <-- 3: the edge at 3 is directed out of 3, but 2 is in
        // neither ant(1) nor ant(3)
        let x = g(&["1", "2", "3"], &[("1", "2", Bidirected), ("3", "2", Directed)]);
        assert!(primitive_inducing_path(&x, 0, 2).is_none());
        // make 2 anterior to 1 while keeping the terminal edges
        let y = g(&["1", "2", "3", "4"], &[("1", "2", Bidirected), ("3", "2", Directed), ("2", "4", Directed), ("4", "1", Directed)]);
        assert!(primitive_inducing_path(&y, 0, 2).is_some());
    }

    #[test]
    fn maximize_rejects_cycles() {
        let x = g(&["1", "2"], &[("1", "2", Directed)]);
        assert!(maximize(&x).is_ok());
        let y = g(&["1", "2", "3"], &[("1", "2", Directed), ("2", "3", Undirected), ("3", "1", Directed)]);
        assert_eq!(maximize(&y).unwrap_err(), Error::NotChainMixed);
    }
}
