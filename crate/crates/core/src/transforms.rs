//! Marginalisation and conditioning of anterial graphs.
//!
//! Both operators build the output in three steps:
//!
//! 1. Local adjacencies. For marginalising over `M`, `i` and `j` become
//!    adjacent when a walk between them runs through `M` only and has no
//!    collider section. For conditioning on `C`, they become adjacent when a
//!    walk between them consists of collider sections only, each meeting
//!    `C ∪ ant(C)`.
//! 2. Marks. The mark at `x` on an edge `x *-* y` is a tail exactly when `x`
//!    is anterior to `y` in the input (to `{y} ∪ C` when conditioning). This
//!    keeps the output anterial and keeps anterior sets intact.
//! 3. Completion. A pair that no admissible set separates in the input, but
//!    which the local graph leaves non-adjacent and not joined by a primitive
//!    inducing path, gets an edge with the same marking rule.
//!
//! Anterior sets are always taken from the input graph.

use crate::classes::is_anterial;
use crate::error::{Error, Result};
use crate::graph::{ids_mask, Mark, MixedGraph};
use crate::inducing::{marks_from_anteriors, primitive_inducing_path};
use crate::separation::{separated_unchecked, step, WalkState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Marginalize,
    Condition,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformSpec {
    pub kind: TransformKind,
    pub targets: Vec<usize>,
}

impl TransformSpec {
    pub fn apply(&self, g: &MixedGraph) -> Result<MixedGraph> {
        match self.kind {
            TransformKind::Marginalize => alpha_m(g, &self.targets),
            TransformKind::Condition => alpha_c(g, &self.targets),
        }
    }
}

fn check_targets(g: &MixedGraph, targets: &[usize]) -> Result<()> {
    if let Some(&t) = targets.iter().find(|&&t| t >= g.n()) {
        return Err(Error::UnknownNode(format!("#{t}")));
    }
    if !is_anterial(g) {
        return Err(Error::NotAnterial);
    }
    Ok(())
}

/// Output skeleton over `keep` with relabelled ids.
struct Projection<'a> {
    g: &'a MixedGraph,
    keep: Vec<usize>,
    // position of an input id in the output, if kept
    pos: Vec<Option<usize>>,
}

impl<'a> Projection<'a> {
    fn new(g: &'a MixedGraph, removed: &[bool]) -> Self {
        let keep: Vec<usize> = (0..g.n()).filter(|&i| !removed[i]).collect();
        let mut pos = vec![None; g.n()];
        for (k, &i) in keep.iter().enumerate() {
            pos[i] = Some(k);
        }
        Projection { g, keep, pos }
    }

    fn empty_output(&self) -> MixedGraph {
        MixedGraph::empty(&self.g.labels_of(&self.keep)).expect("labels are unique")
    }
}

/// Marginalises the nodes `m` out of an anterial graph.
pub fn alpha_m(g: &MixedGraph, m: &[usize]) -> Result<MixedGraph> {
    check_targets(g, m)?;
    if m.is_empty() {
        return Ok(g.clone());
    }
    let n = g.n();
    let in_m = ids_mask(n, m);
    let proj = Projection::new(g, &in_m);
    let ant: Vec<Vec<bool>> = (0..n).map(|i| g.ant_mask(&[i])).collect();
    let tail_at = |x: usize, y: usize| ant[y][x] && x != y;

    let mut local = proj.empty_output();
    let none = vec![false; n];
    for &i in &proj.keep {
        for j in reach_through(g, i, &in_m, &none) {
            if j > i {
                add_marked(&mut local, &proj, i, j, &tail_at);
            }
        }
    }

    // pairs that no subset of the observed nodes separates
    let inseparable = |i: usize, j: usize| {
        let mut z = ant_pair(g, i, j, &[]);
        for k in 0..n {
            z[k] &= !in_m[k];
        }
        !separated_unchecked(g, i, j, &z)
    };
    Ok(complete(&proj, local, inseparable, &tail_at))
}

/// Conditions an anterial graph on the nodes `c`.
pub fn alpha_c(g: &MixedGraph, c: &[usize]) -> Result<MixedGraph> {
    check_targets(g, c)?;
    if c.is_empty() {
        return Ok(g.clone());
    }
    let n = g.n();
    let in_c = ids_mask(n, c);
    let proj = Projection::new(g, &in_c);
    let ant_c = g.ant_mask(c);
    let ant: Vec<Vec<bool>> = (0..n).map(|i| g.ant_mask(&[i])).collect();
    let tail_at = |x: usize, y: usize| (ant[y][x] || ant_c[x]) && x != y;

    let mut local = proj.empty_output();
    for &i in &proj.keep {
        for j in collider_reach(g, i, &in_c, &ant_c) {
            if j > i {
                add_marked(&mut local, &proj, i, j, &tail_at);
            }
        }
    }

    let inseparable = |i: usize, j: usize| {
        let mut z = ant_pair(g, i, j, c);
        for &x in c {
            z[x] = true;
        }
        !separated_unchecked(g, i, j, &z)
    };
    Ok(complete(&proj, local, inseparable, &tail_at))
}

/// `ant({i, j} ∪ extra) ∪ extra`, without `i` and `j`.
fn ant_pair(g: &MixedGraph, i: usize, j: usize, extra: &[usize]) -> Vec<bool> {
    let mut seeds = vec![i, j];
    seeds.extend_from_slice(extra);
    let mut z = g.ant_mask(&seeds);
    z[i] = false;
    z[j] = false;
    z
}

fn add_marked(h: &mut MixedGraph, proj: &Projection, i: usize, j: usize, tail_at: &dyn Fn(usize, usize) -> bool) {
    let (mi, mj) = marks_from_anteriors(tail_at(i, j), tail_at(j, i));
    let (a, b) = (proj.pos[i].unwrap(), proj.pos[j].unwrap());
    h.set_edge(a, b, mi, mj);
}

fn complete(
    proj: &Projection,
    local: MixedGraph,
    inseparable: impl Fn(usize, usize) -> bool,
    tail_at: &dyn Fn(usize, usize) -> bool,
) -> MixedGraph {
    let mut missing = Vec::new();
    for (a, &i) in proj.keep.iter().enumerate() {
        for (b, &j) in proj.keep.iter().enumerate().skip(a + 1) {
            if !local.adjacent(a, b) && primitive_inducing_path(&local, a, b).is_none() && inseparable(i, j) {
                missing.push((i, j));
            }
        }
    }
    let mut out = local;
    for (i, j) in missing {
        add_marked(&mut out, proj, i, j, tail_at);
    }
    out
}

/// Kept nodes reachable from `i` by a walk without collider sections whose
/// interior lies in `inner`.
fn reach_through(g: &MixedGraph, i: usize, inner: &[bool], no_z: &[bool]) -> Vec<usize> {
    let n = g.n();
    let mut found = vec![false; n];
    let mut seen = vec![false; 4 * n];
    let start = WalkState { node: i, entered_with_head: false, z_seen_in_section: false };
    let idx = |s: &WalkState| s.node * 4 + s.entered_with_head as usize * 2 + s.z_seen_in_section as usize;
    seen[idx(&start)] = true;
    let mut stack = vec![start];
    while let Some(s) = stack.pop() {
        for a in g.adj(s.node) {
            if let Some(t) = step(s, a.node, a.near, a.far, no_z) {
                if !inner[t.node] {
                    if t.node != i {
                        found[t.node] = true;
                    }
                } else if !seen[idx(&t)] {
                    seen[idx(&t)] = true;
                    stack.push(t);
                }
            }
        }
    }
    (0..n).filter(|&k| found[k]).collect()
}

/// Kept nodes `j` reachable from `i` by a walk whose sections between the
/// endpoints are all collider sections meeting `C ∪ ant(C)`.
fn collider_reach(g: &MixedGraph, i: usize, in_c: &[bool], ant_c: &[bool]) -> Vec<usize> {
    let n = g.n();
    let mut found = vec![false; n];
    // state: (node, section has met C ∪ ant(C)); sections are always entered
    // through an arrowhead
    let mut seen = vec![false; 2 * n];
    let mut stack = Vec::new();
    for a in g.adj(i) {
        if a.far == Mark::Head && a.node != i {
            let met = ant_c[a.node];
            if !seen[2 * a.node + met as usize] {
                seen[2 * a.node + met as usize] = true;
                stack.push((a.node, met));
            }
        }
    }
    while let Some((x, met)) = stack.pop() {
        for a in g.adj(x) {
            if a.node == i {
                continue;
            }
            let next = if a.near == Mark::Tail && a.far == Mark::Tail {
                Some((a.node, met || ant_c[a.node]))
            } else if a.near == Mark::Head && met {
                // the section closes as a collider
                if !in_c[a.node] {
                    found[a.node] = true;
                }
                (a.far == Mark::Head).then_some((a.node, ant_c[a.node]))
            } else {
                None
            };
            if let Some((y, m)) = next {
                if !seen[2 * y + m as usize] {
                    seen[2 * y + m as usize] = true;
                    stack.push((y, m));
                }
            }
        }
    }
    (0..n).filter(|&k| found[k] && k != i).collect()
}

/// Whether both evaluation orders of a two-step marginalisation agree exactly.
pub fn compose_check(g: &MixedGraph, m1: &[usize], m2: &[usize]) -> Result<bool> {
    let first = alpha_m(g, m1)?;
    let m2_in_first: Vec<usize> = m2.iter().map(|&k| first.id_of(g.label(k))).collect::<Result<_>>()?;
    let two_step = alpha_m(&first, &m2_in_first)?;
    let mut union = m1.to_vec();
    union.extend_from_slice(m2);
    Ok(two_step == alpha_m(g, &union)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeKind::{self, *};

    fn g(labels: &[&str], edges: &[(&str, &str, EdgeKind)]) -> MixedGraph {
        MixedGraph::build(labels, edges).unwrap()
    }

    fn marg(x: &MixedGraph, m: &[&str]) -> MixedGraph {
        alpha_m(x, &x.ids_of(m).unwrap()).unwrap()
    }

    fn cond(x: &MixedGraph, c: &[&str]) -> MixedGraph {
        alpha_c(x, &x.ids_of(c).unwrap()).unwrap()
    }

    #[test]
    fn latent_chain_and_confounder() {
        let x = g(&["1", "m", "2"], &[("1", "m", Directed), ("m", "2", Directed)]);
        assert_eq!(marg(&x, &["m"]), g(&["1", "2"], &[("1", "2", Directed)]));
        let y = g(&["1", "m", "2"], &[("m", "1", Directed), ("m", "2", Directed)]);
        assert_eq!(marg(&y, &["m"]), g(&["1", "2"], &[("1", "2", Bidirected)]));
        let z = g(&["1", "m", "2"], &[("1", "m", Directed), ("m", "2", Undirected)]);
        assert_eq!(marg(&z, &["m"]), g(&["1", "2"], &[("1", "2", Directed)]));
    }

    #[test]
    fn conditioning_examples() {
        let x = g(&["1", "c", "2"], &[("1", "c", Directed), ("2", "c", Directed)]);
        assert_eq!(cond(&x, &["c"]), g(&["1", "2"], &[("1", "2", Undirected)]));
        let y = g(&["1", "c", "2"], &[("1", "c", Directed), ("c", "2", Directed)]);
        assert_eq!(cond(&y, &["c"]), g(&["1", "2"], &[] as &[(&str, &str, EdgeKind)]));
        let z = g(&["1", "c", "2"], &[("1", "c", Bidirected), ("2", "c", Directed)]);
        assert_eq!(cond(&z, &["c"]), g(&["1", "2"], &[("2", "1", Directed)]));
    }

    #[test]
    fn empty_targets_are_identity() {
        let x = g(&["1", "2", "3"], &[("1", "2", Bidirected), ("2", "3", Undirected)]);
        assert_eq!(alpha_m(&x, &[]).unwrap(), x);
        assert_eq!(alpha_c(&x, &[]).unwrap(), x);
    }

    #[test]
    fn hidden_confounder_of_a_direct_edge_needs_completion() {
        // k --> i <-- h --> j, i --> j; hiding h must keep k and j adjacent
        let x = g(
            &["k", "i", "h", "j"],
            &[("k", "i", Directed), ("h", "i", Directed), ("h", "j", Directed), ("i", "j", Directed)],
        );
        let h = marg(&x, &["h"]);
        assert_eq!(h, g(&["k", "i", "j"], &[("k", "i", Directed), ("i", "j", Directed), ("k", "j", Directed)]));
    }

    #[test]
    fn non_anterial_input_is_rejected() {
        let x = g(&["1", "2", "3"], &[("1", "2", Bidirected), ("1", "3", Directed), ("3", "2", Directed)]);
        assert_eq!(alpha_m(&x, &[2]).unwrap_err(), Error::NotAnterial);
    }

    #[test]
    fn composition_of_a_chain() {
        let x = g(&["1", "a", "b", "2"], &[("1", "a", Directed), ("a", "b", Directed), ("b", "2", Directed)]);
        assert!(compose_check(&x, &[1], &[2]).unwrap());
        assert_eq!(marg(&x, &["a", "b"]), g(&["1", "2"], &[("1", "2", Directed)]));
    }
}
