//! Graph-class predicates with witnesses, and the chain-component collapse.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeKind, Mark, MixedGraph};
use crate::inducing::{inseparable, primitive_inducing_path};

/// Why a predicate failed, in node ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Closed semi-directed walk `v0 .. vk v0` using at least one directed edge.
    SemiDirectedCycle { nodes: Vec<usize> },
    /// Bidirected edge `a <-> b` with a semi-directed path from `a` to `b`.
    BidirectedPath { a: usize, b: usize, path: Vec<usize> },
    /// `a <-> b` but `a` is not joined to `c` in the component of `b`.
    MissingBidirected { a: usize, b: usize, c: usize },
    /// Node with an undirected edge and an arrowhead.
    UndirectedWithArrowhead { node: usize },
    /// The graph has a bidirected edge.
    Bidirected { a: usize, b: usize },
    /// The graph has a non-directed edge.
    NonDirected { a: usize, b: usize },
    /// Non-adjacent pair that no set separates, with a primitive inducing path
    /// or else a walk connecting it given its anterior set.
    Inseparable { a: usize, b: usize, path: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphClassReport {
    pub is_chain_mixed: bool,
    pub is_anterial: bool,
    pub is_chain_connected: bool,
    pub is_ancestral: bool,
    pub is_chain_graph: bool,
    pub is_dag: bool,
    pub is_maximal: bool,
    pub witnesses: Witnesses,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Witnesses {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_mixed: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anterial: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_connected: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ancestral: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_graph: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dag: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maximal: Option<Witness>,
}

/// Shortest semi-directed path from `from` to `to` (both included).
pub(crate) fn semi_directed_path(g: &MixedGraph, from: usize, to: usize) -> Option<Vec<usize>> {
    let n = g.n();
    let mut prev = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut path = vec![to];
            let mut c = to;
            while c != from {
                c = prev[c];
                path.push(c);
            }
            path.reverse();
            return Some(path);
        }
        for a in g.adj(x) {
            if a.near == Mark::Tail && !seen[a.node] {
                seen[a.node] = true;
                prev[a.node] = x;
                queue.push_back(a.node);
            }
        }
    }
    None
}

pub fn semi_directed_cycle(g: &MixedGraph) -> Option<Witness> {
    for e in g.edges() {
        if e.kind() == EdgeKind::Directed {
            if let Some(mut path) = semi_directed_path(g, e.v, e.u) {
                path.insert(0, e.u);
                path.pop();
                return Some(Witness::SemiDirectedCycle { nodes: path });
            }
        }
    }
    None
}

fn bidirected_with_path(g: &MixedGraph) -> Option<Witness> {
    for e in g.edges() {
        if e.kind() == EdgeKind::Bidirected {
            for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                if let Some(path) = semi_directed_path(g, a, b) {
                    return Some(Witness::BidirectedPath { a, b, path });
                }
            }
        }
    }
    None
}

fn missing_bidirected(g: &MixedGraph) -> Option<Witness> {
    let comp = g.component_ids();
    for e in g.edges() {
        if e.kind() != EdgeKind::Bidirected {
            continue;
        }
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            for c in g.ordered_ids() {
                if comp[c] == comp[b] && g.edge_kind(a, c) != Some(EdgeKind::Bidirected) {
                    return Some(Witness::MissingBidirected { a, b, c });
                }
            }
        }
    }
    None
}

pub fn is_chain_mixed(g: &MixedGraph) -> bool {
    semi_directed_cycle(g).is_none()
}

pub fn is_anterial(g: &MixedGraph) -> bool {
    is_chain_mixed(g) && bidirected_with_path(g).is_none()
}

pub fn is_chain_connected(g: &MixedGraph) -> bool {
    missing_bidirected(g).is_none()
}

/// Anterial, and no node with an undirected edge also carries an arrowhead.
pub fn is_ancestral_graph(g: &MixedGraph) -> bool {
    is_anterial(g)
        && (0..g.n()).all(|i| {
            let undirected = g.adj(i).iter().any(|a| a.near == Mark::Tail && a.far == Mark::Tail);
            !undirected || g.adj(i).iter().all(|a| a.near == Mark::Tail)
        })
}

pub fn is_dag(g: &MixedGraph) -> bool {
    g.edges().iter().all(|e| e.kind() == EdgeKind::Directed) && is_chain_mixed(g)
}

pub fn is_chain_connected_anterial(g: &MixedGraph) -> bool {
    is_anterial(g) && is_chain_connected(g)
}

/// Decides every class predicate and records a witness for each failure.
pub fn classify(g: &MixedGraph) -> GraphClassReport {
    let mut w = Witnesses { chain_mixed: semi_directed_cycle(g), ..Default::default() };
    let is_chain_mixed = w.chain_mixed.is_none();

    w.anterial = w.chain_mixed.clone().or_else(|| bidirected_with_path(g));
    let is_anterial = w.anterial.is_none();

    w.chain_connected = missing_bidirected(g);
    let is_chain_connected = w.chain_connected.is_none();

    w.ancestral = w.anterial.clone().or_else(|| {
        (0..g.n()).find_map(|i| {
            let undirected = g.adj(i).iter().any(|a| a.near == Mark::Tail && a.far == Mark::Tail);
            let head = g.adj(i).iter().any(|a| a.near == Mark::Head);
            (undirected && head).then_some(Witness::UndirectedWithArrowhead { node: i })
        })
    });
    let is_ancestral = w.ancestral.is_none();

    w.chain_graph = w.chain_mixed.clone().or_else(|| {
        g.edges()
            .into_iter()
            .find(|e| e.kind() == EdgeKind::Bidirected)
            .map(|e| Witness::Bidirected { a: e.u, b: e.v })
    });
    let is_chain_graph = w.chain_graph.is_none();

    w.dag = g
        .edges()
        .into_iter()
        .find(|e| e.kind() != EdgeKind::Directed)
        .map(|e| Witness::NonDirected { a: e.u, b: e.v })
        .or_else(|| w.chain_mixed.clone());
    let is_dag = w.dag.is_none();

    w.maximal = if is_chain_mixed { first_inducing_pair(g) } else { first_inseparable_pair(g) };
    let is_maximal = w.maximal.is_none();

    GraphClassReport {
        is_chain_mixed,
        is_anterial,
        is_chain_connected,
        is_ancestral,
        is_chain_graph,
        is_dag,
        is_maximal,
        witnesses: w,
    }
}

fn first_inducing_pair(g: &MixedGraph) -> Option<Witness> {
    let ids = g.ordered_ids();
    for (x, &a) in ids.iter().enumerate() {
        for &b in &ids[x + 1..] {
            if !g.adjacent(a, b) {
                if let Some(path) = primitive_inducing_path(g, a, b) {
                    return Some(Witness::Inseparable { a, b, path });
                }
                if inseparable(g, a, b) {
                    let mut z = g.ant_mask(&[a, b]);
                    z[a] = false;
                    z[b] = false;
                    let path = crate::separation::connecting_walk(g, &[a], &[b], &crate::graph::mask_ids(&z)).unwrap_or_default();
                    return Some(Witness::Inseparable { a, b, path });
                }
            }
        }
    }
    None
}

// Outside chain mixed graphs inducing paths do not characterise separability,
// so fall back to searching conditioning sets.
fn first_inseparable_pair(g: &MixedGraph) -> Option<Witness> {
    let ids = g.ordered_ids();
    for (x, &a) in ids.iter().enumerate() {
        for &b in &ids[x + 1..] {
            if !g.adjacent(a, b) {
                let rest: Vec<usize> = ids.iter().copied().filter(|&k| k != a && k != b).collect();
                if crate::separation::find_separating_set(g, a, b, &rest).is_none() {
                    return Some(Witness::Inseparable { a, b, path: Vec::new() });
                }
            }
        }
    }
    None
}

/// One node per chain component, labelled `{a,b,..}`; directed and
/// bidirected edges between components are kept.
pub fn collapse(g: &MixedGraph) -> Result<MixedGraph> {
    if !is_chain_connected_anterial(g) {
        return Err(if is_chain_connected(g) { Error::NotAnterial } else { Error::NotChainConnected });
    }
    let comps = g.chain_components();
    let mut of = vec![0usize; g.n()];
    for (k, c) in comps.iter().enumerate() {
        for &i in c {
            of[i] = k;
        }
    }
    let labels: Vec<String> = comps.iter().map(|c| format!("{{{}}}", g.labels_of(c).join(","))).collect();
    let mut out = MixedGraph::empty(&labels)?;
    for e in g.edges() {
        let (a, b) = (of[e.u], of[e.v]);
        if a != b {
            out.set_edge(a, b, e.mark_u, e.mark_v);
        }
    }
    Ok(out)
}
