//! Oracles shared by the integration suites and the acceptance runner.
#![allow(dead_code)]

use anterial::adjust::AdjustmentProblem;
use anterial::gaussian::{exact_ci, GaussianLaw};
use anterial::generate::GraphSampler;
use anterial::label::do_label;
use anterial::separation::separated;
use anterial::transforms::{alpha_c, alpha_m};
use anterial::EdgeKind::{Bidirected, Directed, Undirected};
use anterial::{EdgeKind, MixedGraph};
use nalgebra::DMatrix;
use rand::Rng;

pub fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |bits| (0..n).filter(|i| bits >> i & 1 == 1).collect())
}

/// Residual variance ratio of `k` given `kept`.
fn residual_ratio(cov: &DMatrix<f64>, k: usize, kept: &[usize]) -> f64 {
    if kept.is_empty() {
        return 1.0;
    }
    let pick = |a: &[usize], b: &[usize]| DMatrix::from_fn(a.len(), b.len(), |x, y| cov[(a[x], b[y])]);
    let inv = pick(kept, kept).try_inverse().expect("kept coordinates are independent");
    let r = cov[(k, k)] - (pick(&[k], kept) * inv * pick(kept, &[k]))[(0, 0)];
    r / cov[(k, k)]
}

/// Exact conditional independence. Conditioning coordinates that are
/// linear functions of earlier ones are dropped first, which leaves the
/// conditioning information unchanged. A coordinate that is a deterministic
/// function of the conditioning set is independent of everything given it.
pub fn law_ci(law: &GaussianLaw, i: usize, j: usize, s: &[usize]) -> bool {
    let mut kept = Vec::new();
    for &k in s {
        if residual_ratio(&law.cov, k, &kept) > 1e-8 {
            kept.push(k);
        }
    }
    exact_ci(&law.cov, i, j, &kept).unwrap_or(true)
}

/// Checks separations of `g` as exact CIs of `law`, matching nodes by label
/// and skipping nodes that are constant in the law. Graphs with at most
/// `exhaustive` usable nodes are checked on every singleton-pair query;
/// larger ones on `samples` random queries. Returns (separations checked,
/// violations).
pub fn check_separations(g: &MixedGraph, law: &GaussianLaw, exhaustive: usize, samples: usize, rng: &mut impl Rng) -> (usize, Vec<String>) {
    let col: Vec<Option<usize>> = (0..g.n())
        .map(|v| {
            let c = law.id(g.label(v)).unwrap_or_else(|_| panic!("law has no column {}", g.label(v)));
            (!law.is_degenerate(c)).then_some(c)
        })
        .collect();
    let usable: Vec<usize> = (0..g.n()).filter(|&v| col[v].is_some()).collect();
    let mut checked = 0;
    let mut bad = Vec::new();
    let query = |a: usize, b: usize, z: Vec<usize>, checked: &mut usize, bad: &mut Vec<String>| {
        if !separated(g, &[a], &[b], &z).unwrap() {
            return;
        }
        *checked += 1;
        let s: Vec<usize> = z.iter().map(|&v| col[v].unwrap()).collect();
        if !law_ci(law, col[a].unwrap(), col[b].unwrap(), &s) {
            bad.push(format!("{} _||_ {} | {:?} in {:?}", g.label(a), g.label(b), g.labels_of(&z), g.labelled_edges()));
        }
    };
    if usable.len() <= exhaustive {
        for (x, &a) in usable.iter().enumerate() {
            for &b in &usable[x + 1..] {
                let rest: Vec<usize> = usable.iter().copied().filter(|&v| v != a && v != b).collect();
                for sub in subsets(rest.len()) {
                    query(a, b, sub.iter().map(|&k| rest[k]).collect(), &mut checked, &mut bad);
                }
            }
        }
    } else {
        for _ in 0..samples {
            let a = usable[rng.random_range(0..usable.len())];
            let b = usable[rng.random_range(0..usable.len())];
            if a == b {
                continue;
            }
            let p: f64 = rng.random_range(0.0..0.6);
            let z = usable.iter().copied().filter(|&v| v != a && v != b && rng.random_bool(p)).collect();
            query(a, b, z, &mut checked, &mut bad);
        }
    }
    (checked, bad)
}

/// Kolmogorov-Smirnov distance between `xs` and the uniform law on [0, 1].
pub fn ks_uniform(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(k, &x)| ((k as f64 + 1.0) / n - x).max(x - k as f64 / n))
        .fold(0.0, f64::max)
}

/// Critical value of the one-sample KS distance at level 1%.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// Edges as `(u, v, kind)` with a directed edge pointing from `u` to `v`,
/// read from the labelled edge list alone.
fn plain_edges(g: &MixedGraph) -> Vec<(usize, usize, EdgeKind)> {
    g.labelled_edges().into_iter().map(|(a, b, k)| (g.id(&a).unwrap(), g.id(&b).unwrap(), k)).collect()
}

/// `set` together with every node that has a semi-directed path into it.
pub fn anterior_oracle(g: &MixedGraph, set: &[usize]) -> Vec<bool> {
    let edges = plain_edges(g);
    let mut inside = vec![false; g.n()];
    for &v in set {
        inside[v] = true;
    }
    loop {
        let mut changed = false;
        for &(u, v, k) in &edges {
            let grow = match k {
                EdgeKind::Directed => [(v, u)].to_vec(),
                EdgeKind::Undirected => vec![(u, v), (v, u)],
                EdgeKind::Bidirected => vec![],
            };
            for (from, to) in grow {
                if inside[from] && !inside[to] {
                    inside[to] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return inside;
        }
    }
}

/// Nodes reachable from `v` along semi-directed paths, excluding `v` unless
/// it lies on a cycle.
fn semi_directed_reach(g: &MixedGraph, v: usize) -> Vec<bool> {
    let edges = plain_edges(g);
    let mut seen = vec![false; g.n()];
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        for &(a, b, k) in &edges {
            let next = match k {
                EdgeKind::Directed if a == x => Some(b),
                EdgeKind::Undirected if a == x => Some(b),
                EdgeKind::Undirected if b == x => Some(a),
                _ => None,
            };
            if let Some(y) = next {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen
}

/// No semi-directed cycle and no semi-directed path between the endpoints
/// of a bidirected edge.
pub fn anterial_oracle(g: &MixedGraph) -> bool {
    plain_edges(g).into_iter().all(|(u, v, k)| match k {
        EdgeKind::Directed => !semi_directed_reach(g, v)[u],
        EdgeKind::Undirected => true,
        EdgeKind::Bidirected => !semi_directed_reach(g, u)[v] && !semi_directed_reach(g, v)[u],
    })
}

/// Undirected connected components, as a component id per node.
fn undirected_components(g: &MixedGraph) -> Vec<usize> {
    let edges = plain_edges(g);
    let mut comp: Vec<usize> = (0..g.n()).collect();
    loop {
        let mut changed = false;
        for &(u, v, k) in &edges {
            if k == EdgeKind::Undirected && comp[u] != comp[v] {
                let m = comp[u].min(comp[v]);
                comp[u] = m;
                comp[v] = m;
                changed = true;
            }
        }
        if !changed {
            return comp;
        }
    }
}

/// Every bidirected edge `a <-> b` has `a <-> c` for all `c` in the
/// undirected component of `b`, and symmetrically.
pub fn chain_connected_oracle(g: &MixedGraph) -> bool {
    let comp = undirected_components(g);
    let edges = plain_edges(g);
    let bi = |x: usize, y: usize| edges.iter().any(|&(u, v, k)| k == EdgeKind::Bidirected && ((u, v) == (x, y) || (u, v) == (y, x)));
    edges.iter().filter(|e| e.2 == EdgeKind::Bidirected).all(|&(a, b, _)| {
        (0..g.n()).all(|c| (comp[c] != comp[b] || c == a || bi(a, c)) && (comp[c] != comp[a] || c == b || bi(b, c)))
    })
}

fn undirected_reach(n: usize, adj: &[Vec<bool>], from: usize, blocked: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(x) = stack.pop() {
        for y in 0..n {
            if adj[x][y] && !seen[y] && !blocked[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// d-separation in a DAG by moralising the ancestral set of the query.
pub fn d_separated_oracle(g: &MixedGraph, a: usize, b: usize, z: &[usize]) -> bool {
    let n = g.n();
    let mut query = z.to_vec();
    query.extend([a, b]);
    let keep = anterior_oracle(g, &query);
    let mut adj = vec![vec![false; n]; n];
    let mut parents = vec![Vec::new(); n];
    for (u, v, k) in plain_edges(g) {
        assert_eq!(k, EdgeKind::Directed, "d-separation needs a DAG");
        if keep[u] && keep[v] {
            adj[u][v] = true;
            adj[v][u] = true;
            parents[v].push(u);
        }
    }
    for ps in &parents {
        for &p in ps {
            for &q in ps {
                if p != q {
                    adj[p][q] = true;
                }
            }
        }
    }
    let blocked: Vec<bool> = (0..n).map(|v| z.contains(&v) || !keep[v]).collect();
    !undirected_reach(n, &adj, a, &blocked)[b]
}

/// m-separation in an ancestral graph by the augmented-graph criterion on
/// the anterior set of the query: two nodes are joined when adjacent or
/// when a path between them has a collider at every interior node.
pub fn m_separated_oracle(g: &MixedGraph, a: usize, b: usize, z: &[usize]) -> bool {
    let n = g.n();
    let mut query = z.to_vec();
    query.extend([a, b]);
    let keep = anterior_oracle(g, &query);
    let edges: Vec<_> = plain_edges(g).into_iter().filter(|&(u, v, _)| keep[u] && keep[v]).collect();
    let mut adj = vec![vec![false; n]; n];
    // into[x]: nodes y with an edge y *-> x
    let mut into = vec![Vec::new(); n];
    let mut district: Vec<usize> = (0..n).collect();
    for &(u, v, k) in &edges {
        adj[u][v] = true;
        adj[v][u] = true;
        match k {
            EdgeKind::Directed => into[v].push(u),
            EdgeKind::Bidirected => {
                into[v].push(u);
                into[u].push(v);
            }
            EdgeKind::Undirected => {}
        }
    }
    loop {
        let mut changed = false;
        for &(u, v, k) in &edges {
            if k == EdgeKind::Bidirected && district[u] != district[v] {
                let m = district[u].min(district[v]);
                district[u] = m;
                district[v] = m;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for p in 0..n {
        for q in 0..n {
            if keep[p] && keep[q] && district[p] == district[q] {
                for &i in &into[p] {
                    for &j in &into[q] {
                        if i != j {
                            adj[i][j] = true;
                        }
                    }
                }
            }
        }
    }
    let blocked: Vec<bool> = (0..n).map(|v| z.contains(&v) || !keep[v]).collect();
    !undirected_reach(n, &adj, a, &blocked)[b]
}

/// Every pair `(a, b)` of distinct nodes in `nodes` with every conditioning
/// set drawn from the rest of `nodes`.
pub fn singleton_queries(nodes: &[usize]) -> Vec<(usize, usize, Vec<usize>)> {
    let mut out = Vec::new();
    for (x, &a) in nodes.iter().enumerate() {
        for &b in &nodes[x + 1..] {
            let rest: Vec<usize> = nodes.iter().copied().filter(|&v| v != a && v != b).collect();
            for sub in subsets(rest.len()) {
                out.push((a, b, sub.iter().map(|&k| rest[k]).collect()));
            }
        }
    }
    out
}

/// Some subset of the other nodes separates every non-adjacent pair.
pub fn maximal_oracle(g: &MixedGraph) -> bool {
    let all: Vec<usize> = (0..g.n()).collect();
    (0..g.n()).all(|a| {
        (a + 1..g.n()).all(|b| {
            g.adjacent(a, b) || {
                let rest: Vec<usize> = all.iter().copied().filter(|&v| v != a && v != b).collect();
                subsets(rest.len()).any(|sub| separated(g, &[a], &[b], &sub.iter().map(|&k| rest[k]).collect::<Vec<_>>()).unwrap())
            }
        })
    })
}

/// Node-splitting construction: each treated node keeps its parents, and a
/// fixed copy takes over its children. A random node is named after the
/// longest treatment prefix whose last fixed node is one of its ancestors.
pub fn split_swig(g: &MixedGraph, order: &[usize]) -> MixedGraph {
    let n = g.n();
    let k = order.len();
    // split-graph ids: 0..n random nodes, n + i fixed copy of order[i]
    let fixed_of = |u: usize| order.iter().position(|&x| x == u).map(|i| n + i);
    let mut children = vec![Vec::new(); n + k];
    for e in g.edges() {
        let from = fixed_of(e.u).unwrap_or(e.u);
        children[from].push(e.v);
    }
    let mut world = vec![0; n];
    for i in 0..k {
        let mut stack = children[n + i].clone();
        let mut seen = vec![false; n];
        while let Some(v) = stack.pop() {
            if !seen[v] {
                seen[v] = true;
                world[v] = world[v].max(i + 1);
                // a treated node passed its children to its fixed copy
                stack.extend(children[v].iter().copied());
            }
        }
    }
    let treatment = g.labels_of(order);
    let mut labels: Vec<String> = (0..n).map(|v| do_label(g.label(v), &treatment[..world[v]])).collect();
    labels.extend((0..k).map(|i| do_label(g.label(order[i]), &treatment[..i + 1])));
    let mut edges = Vec::new();
    for (from, cs) in children.iter().enumerate() {
        for &c in cs {
            edges.push((labels[from].clone(), labels[c].clone(), EdgeKind::Directed));
        }
    }
    MixedGraph::build(&labels, &edges).unwrap()
}

/// A random subset of nodes listed so that no node follows a descendant.
pub fn random_order(s: &mut GraphSampler, g: &MixedGraph) -> Vec<usize> {
    let mut c = s.subset(g.n(), 0.35);
    let ant_size = |x: usize| g.ant_mask(&[x]).iter().filter(|&&b| b).count();
    c.sort_by_key(|&x| ant_size(x));
    c
}


/// Separating sets `S` with `L ⊆ S ⊆ U`, by exhaustive enumeration.
pub fn separating_sets(p: &AdjustmentProblem) -> Vec<Vec<String>> {
    let g = &p.graph;
    let (c, o) = (g.id_of(&p.treatment[0]).unwrap(), g.id_of(&p.outcome[0]).unwrap());
    let free: Vec<&String> = p.upper.iter().filter(|u| !p.lower.contains(u)).collect();
    subsets(free.len())
        .map(|sub| {
            let mut s = p.lower.clone();
            s.extend(sub.iter().map(|&k| free[k].clone()));
            s
        })
        .filter(|s| separated(g, &[c], &[o], &g.ids_of(s).unwrap()).unwrap())
        .collect()
}

pub fn random_problem(s: &mut GraphSampler, n: usize) -> AdjustmentProblem {
    let g = s.anterial(n);
    let c = s.rng().random_range(0..n);
    let o = (c + s.rng().random_range(1..n)) % n;
    let upper: Vec<String> = (0..n).filter(|&v| v != c && v != o && s.rng().random_bool(0.6)).map(|v| g.label(v).to_string()).collect();
    let lower: Vec<String> = upper.iter().filter(|_| s.rng().random_bool(0.3)).cloned().collect();
    AdjustmentProblem::new(g.clone(), g.label(c), g.label(o), &lower, &upper)
}

pub fn same_set(a: &[String], b: &[String]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

/// The selection with the maximisation before the adjacency test left out.
pub fn feasible_without_maximize(p: &AdjustmentProblem) -> bool {
    let g = &p.graph;
    let cond = alpha_c(g, &g.ids_of(&p.lower).unwrap()).unwrap();
    let (c, o) = (&p.treatment[0], &p.outcome[0]);
    let out: Vec<usize> = (0..cond.n())
        .filter(|&v| {
            let l = cond.label(v);
            l != c && l != o && !p.upper.iter().any(|u| u == l)
        })
        .collect();
    let g0 = alpha_m(&cond, &out).unwrap();
    !g0.adjacent(g0.id_of(c).unwrap(), g0.id_of(o).unwrap())
}

/// Marginalising 5 out of this maximal graph leaves 4 and 1 non-adjacent
/// even though no subset of {2, 3} separates them.
pub fn projection_regression() -> AdjustmentProblem {
    let labels = ["1", "2", "3", "4", "5"];
    let edges = [("1", "2", Undirected), ("2", "4", Bidirected), ("3", "4", Undirected), ("5", "1", Directed), ("5", "2", Directed), ("5", "3", Directed)];
    AdjustmentProblem::new(MixedGraph::build(&labels, &edges).unwrap(), "4", "1", &[] as &[&str], &["2", "3"])
}

