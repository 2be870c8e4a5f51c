//! Walk/section separation for mixed graphs.
//!
//! A section of a walk is a maximal run of undirected edges (possibly a single
//! node). A section is a collider when it has two bordering edges that both
//! point into it; sections holding a walk endpoint are non-colliders. A walk is
//! `Z`-connecting when every collider section meets `Z` and every non-collider
//! section avoids it.
//!
//! `separated` decides this by reachability over `(node, entered with head,
//! section has met Z)`.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{ids_mask, Mark, MixedGraph};

/// Walk state: current node, whether its section was entered through an
/// arrowhead, and whether the section has met `Z` so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WalkState {
    pub node: usize,
    pub entered_with_head: bool,
    pub z_seen_in_section: bool,
}

impl WalkState {
    fn index(&self) -> usize {
        self.node * 4 + (self.entered_with_head as usize) * 2 + self.z_seen_in_section as usize
    }
}

/// Transition along one edge from state `s` to `w`, where `(near, far)` are
/// the marks at the current node and at `w`.
pub(crate) fn step(s: WalkState, w: usize, near: Mark, far: Mark, in_z: &[bool]) -> Option<WalkState> {
    let next = if near == Mark::Tail && far == Mark::Tail {
        WalkState { node: w, entered_with_head: s.entered_with_head, z_seen_in_section: s.z_seen_in_section || in_z[w] }
    } else {
        let collider = s.entered_with_head && near == Mark::Head;
        if collider != s.z_seen_in_section {
            return None;
        }
        WalkState { node: w, entered_with_head: far == Mark::Head, z_seen_in_section: in_z[w] }
    };
    // a section entered through a tail can never become a collider
    if !next.entered_with_head && next.z_seen_in_section {
        None
    } else {
        Some(next)
    }
}

fn check_query(g: &MixedGraph, a: &[usize], b: &[usize], z: &[usize]) -> Result<()> {
    let n = g.n();
    if a.is_empty() || b.is_empty() {
        return Err(Error::OverlappingSets);
    }
    let mut owner = vec![0u8; n];
    for (tag, set) in [(1u8, a), (2, b), (3, z)] {
        for &x in set {
            if x >= n {
                return Err(Error::UnknownNode(format!("#{x}")));
            }
            if owner[x] != 0 && owner[x] != tag {
                return Err(Error::OverlappingSets);
            }
            owner[x] = tag;
        }
    }
    Ok(())
}

/// True when no `Z`-connecting walk joins a node of `A` to a node of `B`.
pub fn separated(g: &MixedGraph, a: &[usize], b: &[usize], z: &[usize]) -> Result<bool> {
    check_query(g, a, b, z)?;
    Ok(connecting_walk(g, a, b, z).is_none())
}

/// Separation for singleton endpoints without query validation.
pub(crate) fn separated_unchecked(g: &MixedGraph, a: usize, b: usize, in_z: &[bool]) -> bool {
    let n = g.n();
    let mut seen = vec![false; 4 * n];
    let start = WalkState { node: a, entered_with_head: false, z_seen_in_section: false };
    seen[start.index()] = true;
    let mut stack = vec![start];
    while let Some(s) = stack.pop() {
        for adj in g.adj(s.node) {
            if let Some(t) = step(s, adj.node, adj.near, adj.far, in_z) {
                if t.node == b && !t.z_seen_in_section {
                    return false;
                }
                if !seen[t.index()] {
                    seen[t.index()] = true;
                    stack.push(t);
                }
            }
        }
    }
    true
}

/// A shortest `Z`-connecting walk from `A` to `B`, as a node sequence.
pub fn connecting_walk(g: &MixedGraph, a: &[usize], b: &[usize], z: &[usize]) -> Option<Vec<usize>> {
    let n = g.n();
    let in_z = ids_mask(n, z);
    let in_b = ids_mask(n, b);
    let mut prev: Vec<Option<usize>> = vec![None; 4 * n];
    let mut seen = vec![false; 4 * n];
    let mut queue = VecDeque::new();
    for &s in a {
        let st = WalkState { node: s, entered_with_head: false, z_seen_in_section: false };
        if !seen[st.index()] {
            seen[st.index()] = true;
            queue.push_back(st);
        }
    }
    let unwind = |prev: &[Option<usize>], mut idx: usize| {
        let mut walk = vec![idx / 4];
        while let Some(p) = prev[idx] {
            walk.push(p / 4);
            idx = p;
        }
        walk.reverse();
        walk
    };
    while let Some(s) = queue.pop_front() {
        for adj in g.adj(s.node) {
            if let Some(t) = step(s, adj.node, adj.near, adj.far, &in_z) {
                if seen[t.index()] {
                    continue;
                }
                seen[t.index()] = true;
                prev[t.index()] = Some(s.index());
                if in_b[t.node] && !t.z_seen_in_section {
                    return Some(unwind(&prev, t.index()));
                }
                queue.push_back(t);
            }
        }
    }
    None
}

/// Section-by-section evaluation of an explicit walk.
pub fn walk_is_connecting(g: &MixedGraph, walk: &[usize], in_z: &[bool]) -> bool {
    if walk.len() < 2 || in_z[walk[0]] || in_z[walk[walk.len() - 1]] {
        return false;
    }
    let mut marks = Vec::with_capacity(walk.len() - 1);
    for w in walk.windows(2) {
        match g.marks(w[0], w[1]) {
            Some(m) => marks.push(m),
            None => return false,
        }
    }
    // sections are maximal runs of nodes joined by undirected edges
    let mut start = 0;
    while start < walk.len() {
        let mut end = start;
        while end + 1 < walk.len() && marks[end] == (Mark::Tail, Mark::Tail) {
            end += 1;
        }
        let meets_z = walk[start..=end].iter().any(|&x| in_z[x]);
        let collider = start > 0
            && end + 1 < walk.len()
            && marks[start - 1].1 == Mark::Head
            && marks[end].0 == Mark::Head;
        if collider != meets_z {
            return false;
        }
        start = end + 1;
    }
    true
}

/// Reference decision by explicit walk enumeration, for graphs of at most ten
/// nodes. Walks are extended depth first; a prefix is dropped when a completed
/// section already violates the criterion or when its last-section state
/// repeats an earlier one on the same prefix.
pub fn separated_bruteforce(g: &MixedGraph, a: &[usize], b: &[usize], z: &[usize]) -> Result<bool> {
    const LIMIT: usize = 10;
    if g.n() > LIMIT {
        return Err(Error::GraphTooLarge { n: g.n(), limit: LIMIT });
    }
    check_query(g, a, b, z)?;
    let in_z = ids_mask(g.n(), z);
    let in_b = ids_mask(g.n(), b);
    for &s in a {
        let mut walk = vec![s];
        let mut path_states = vec![prefix_state(g, &walk, &in_z)];
        if dfs(g, &mut walk, &mut path_states, &in_z, &in_b) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// State of the last section of a prefix, recomputed from the prefix itself.
/// `None` when some completed section already violates the criterion.
fn prefix_state(g: &MixedGraph, walk: &[usize], in_z: &[bool]) -> Option<(usize, bool, bool)> {
    let k = walk.len();
    let mut sec_start = k - 1;
    while sec_start > 0 && g.marks(walk[sec_start - 1], walk[sec_start]) == Some((Mark::Tail, Mark::Tail)) {
        sec_start -= 1;
    }
    if !completed_sections_ok(g, walk, in_z) {
        return None;
    }
    let entered_head = sec_start > 0 && g.marks(walk[sec_start - 1], walk[sec_start]).unwrap().1 == Mark::Head;
    let meets_z = walk[sec_start..].iter().any(|&x| in_z[x]);
    Some((walk[k - 1], entered_head, meets_z))
}

/// Checks every section of `walk` except the last one.
fn completed_sections_ok(g: &MixedGraph, walk: &[usize], in_z: &[bool]) -> bool {
    let marks: Vec<(Mark, Mark)> = walk.windows(2).map(|w| g.marks(w[0], w[1]).unwrap()).collect();
    let mut start = 0;
    while start < walk.len() {
        let mut end = start;
        while end + 1 < walk.len() && marks[end] == (Mark::Tail, Mark::Tail) {
            end += 1;
        }
        if end + 1 >= walk.len() {
            break;
        }
        let meets_z = walk[start..=end].iter().any(|&x| in_z[x]);
        let collider = start > 0 && marks[start - 1].1 == Mark::Head && marks[end].0 == Mark::Head;
        if collider != meets_z {
            return false;
        }
        start = end + 1;
    }
    true
}

fn dfs(
    g: &MixedGraph,
    walk: &mut Vec<usize>,
    states: &mut Vec<Option<(usize, bool, bool)>>,
    in_z: &[bool],
    in_b: &[bool],
) -> bool {
    let cur = walk[walk.len() - 1];
    for adj in g.adj(cur) {
        walk.push(adj.node);
        let st = prefix_state(g, walk, in_z);
        let fresh = st.is_some() && !states.contains(&st);
        if fresh {
            if in_b[adj.node] && walk_is_connecting(g, walk, in_z) {
                return true;
            }
            states.push(st);
            if dfs(g, walk, states, in_z, in_b) {
                return true;
            }
            states.pop();
        }
        walk.pop();
    }
    false
}

/// All `(i, j | Z)` singleton queries agree. Limited to twelve nodes.
pub fn markov_equivalent(g1: &MixedGraph, g2: &MixedGraph) -> Result<bool> {
    const LIMIT: usize = 12;
    if g1.n() != g2.n() || g1.labels().iter().any(|l| g2.id(l).is_none()) {
        return Err(Error::NodeSetMismatch);
    }
    let n = g1.n();
    if n > LIMIT {
        return Err(Error::GraphTooLarge { n, limit: LIMIT });
    }
    let map: Vec<usize> = (0..n).map(|i| g2.id(g1.label(i)).unwrap()).collect();
    for i in 0..n {
        for j in i + 1..n {
            let rest: Vec<usize> = (0..n).filter(|&k| k != i && k != j).collect();
            for bits in 0u32..(1 << rest.len()) {
                let mut z1 = vec![false; n];
                let mut z2 = vec![false; n];
                for (t, &k) in rest.iter().enumerate() {
                    if bits >> t & 1 == 1 {
                        z1[k] = true;
                        z2[map[k]] = true;
                    }
                }
                if separated_unchecked(g1, i, j, &z1) != separated_unchecked(g2, map[i], map[j], &z2) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Smallest `Z` within `candidates` separating `i` and `j`; among sets of
/// equal size the first in lexicographic label order.
pub fn find_separating_set(g: &MixedGraph, i: usize, j: usize, candidates: &[usize]) -> Option<Vec<usize>> {
    let mut cand: Vec<usize> = candidates.iter().copied().filter(|&k| k != i && k != j).collect();
    g.sort_ids(&mut cand);
    cand.dedup();
    let n = g.n();
    for size in 0..=cand.len() {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let mut z = vec![false; n];
            for &t in &idx {
                z[cand[t]] = true;
            }
            if separated_unchecked(g, i, j, &z) {
                return Some(idx.iter().map(|&t| cand[t]).collect());
            }
            if !next_combination(&mut idx, cand.len()) {
                break;
            }
        }
    }
    None
}

pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut p = k;
    while p > 0 {
        p -= 1;
        if idx[p] < n - k + p {
            idx[p] += 1;
            for q in p + 1..k {
                idx[q] = idx[q - 1] + 1;
            }
            return true;
        }
    }
    false
}
