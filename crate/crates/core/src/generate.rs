//! Seeded random and exhaustive graph generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classes::{is_ancestral_graph, is_anterial, is_chain_connected};
use crate::graph::{Edge, EdgeKind, Mark, MixedGraph};

pub fn numeric_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

/// Edge states of a pair `(i, j)` with `i < j` used by the enumerators.
const PAIR_STATES: usize = 5;

fn pair_edge(i: usize, j: usize, state: usize) -> Option<Edge> {
    match state {
        0 => None,
        1 => Some(Edge::new(i, j, EdgeKind::Directed)),
        2 => Some(Edge::new(j, i, EdgeKind::Directed)),
        3 => Some(Edge::new(i, j, EdgeKind::Undirected)),
        _ => Some(Edge::new(i, j, EdgeKind::Bidirected)),
    }
}

/// Every mixed graph on `n` labelled nodes satisfying `keep`.
pub fn all_graphs(n: usize, keep: impl Fn(&MixedGraph) -> bool) -> Vec<MixedGraph> {
    let labels = numeric_labels(n);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total = PAIR_STATES.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut edges = Vec::with_capacity(pairs.len());
        for &(i, j) in &pairs {
            if let Some(e) = pair_edge(i, j, c % PAIR_STATES) {
                edges.push(e);
            }
            c /= PAIR_STATES;
        }
        let g = MixedGraph::from_edges(&labels, &edges).expect("valid edge list");
        if keep(&g) {
            out.push(g);
        }
    }
    out
}

pub fn all_anterial(n: usize) -> Vec<MixedGraph> {
    all_graphs(n, is_anterial)
}

/// Random generator with independent edge probabilities per kind.
#[derive(Debug, Clone)]
pub struct GraphSampler {
    rng: ChaCha8Rng,
}

impl GraphSampler {
    pub fn new(seed: u64) -> Self {
        GraphSampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Random DAG: random topological order, each forward pair an edge with
    /// probability `p`.
    pub fn dag(&mut self, n: usize, p: f64) -> MixedGraph {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut self.rng);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if self.rng.random_bool(p) {
                    edges.push(Edge::new(order[a], order[b], EdgeKind::Directed));
                }
            }
        }
        MixedGraph::from_edges(&numeric_labels(n), &edges).unwrap()
    }

    /// Random mixed graph with directed edges along a random order, so the
    /// only possible semi-directed cycles run through undirected edges.
    pub fn mixed(&mut self, n: usize, p: f64, kinds: [f64; 3]) -> MixedGraph {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut self.rng);
        let total: f64 = kinds.iter().sum();
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if !self.rng.random_bool(p) {
                    continue;
                }
                let r = self.rng.random::<f64>() * total;
                let (u, v) = (order[a], order[b]);
                let e = if r < kinds[0] {
                    Edge::new(u, v, EdgeKind::Directed)
                } else if r < kinds[0] + kinds[1] {
                    Edge::new(u, v, EdgeKind::Undirected)
                } else {
                    Edge::new(u, v, EdgeKind::Bidirected)
                };
                edges.push(e);
            }
        }
        MixedGraph::from_edges(&numeric_labels(n), &edges).unwrap()
    }

    /// Rejection sampling until `keep` holds.
    pub fn until(&mut self, mut draw: impl FnMut(&mut Self) -> MixedGraph, keep: impl Fn(&MixedGraph) -> bool) -> MixedGraph {
        loop {
            let g = draw(self);
            if keep(&g) {
                return g;
            }
        }
    }

    pub fn anterial(&mut self, n: usize) -> MixedGraph {
        let p = self.rng.random_range(0.25..0.7);
        self.until(|s| s.mixed(n, p, [0.5, 0.25, 0.25]), is_anterial)
    }

    pub fn ancestral(&mut self, n: usize) -> MixedGraph {
        let p = self.rng.random_range(0.25..0.7);
        self.until(|s| s.mixed(n, p, [0.55, 0.15, 0.3]), is_ancestral_graph)
    }

    pub fn chain_mixed(&mut self, n: usize) -> MixedGraph {
        let p = self.rng.random_range(0.25..0.7);
        self.until(|s| s.mixed(n, p, [0.4, 0.3, 0.3]), crate::classes::is_chain_mixed)
    }

    pub fn chain_graph(&mut self, n: usize) -> MixedGraph {
        let p = self.rng.random_range(0.25..0.7);
        self.until(|s| s.mixed(n, p, [0.6, 0.4, 0.0]), crate::classes::is_chain_mixed)
    }

    /// Random chain-connected anterial graph: an anterial graph whose
    /// bidirected edges are closed over whole chain components, retried until
    /// the closure stays anterial.
    pub fn chain_connected_anterial(&mut self, n: usize) -> MixedGraph {
        loop {
            let g = self.anterial(n);
            let closed = close_bidirected(&g);
            if let Some(h) = closed {
                if is_anterial(&h) && is_chain_connected(&h) {
                    return h;
                }
            }
        }
    }

    /// A random subset of `0..n` with each element kept with probability `p`.
    pub fn subset(&mut self, n: usize, p: f64) -> Vec<usize> {
        (0..n).filter(|_| self.rng.random_bool(p)).collect()
    }
}

/// Adds `a <-> c` for every `a <-> b` and `c` in the component of `b`.
/// `None` if that would overwrite a non-bidirected edge.
fn close_bidirected(g: &MixedGraph) -> Option<MixedGraph> {
    let comp = g.component_ids();
    let mut h = g.clone();
    loop {
        let mut changed = false;
        for e in h.edges() {
            if e.kind() != EdgeKind::Bidirected {
                continue;
            }
            for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                for c in 0..h.n() {
                    if comp[c] == comp[b] && c != a {
                        match h.edge_kind(a, c) {
                            Some(EdgeKind::Bidirected) => {}
                            Some(_) => return None,
                            None => {
                                h.set_edge(a, c, Mark::Head, Mark::Head);
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            return Some(h);
        }
    }
}
