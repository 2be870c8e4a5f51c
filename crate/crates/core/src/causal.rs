//! Graphical interventions, counterfactual graphs and single-world graphs.

use std::collections::BTreeMap;

use crate::classes::{is_chain_connected_anterial, is_dag};
use crate::error::{Error, Result};
use crate::graph::{ids_mask, mask_ids, EdgeKind, Mark, MixedGraph};
use crate::label::do_label;
use crate::transforms::alpha_m;

/// Treatment set plus optional intervention values keyed by label.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InterventionSpec {
    pub treatment: Vec<String>,
    pub values: Option<BTreeMap<String, f64>>,
}

impl InterventionSpec {
    pub fn new<S: AsRef<str>>(treatment: &[S]) -> Self {
        InterventionSpec { treatment: treatment.iter().map(|s| s.as_ref().to_string()).collect(), values: None }
    }

    pub fn with_values<S: AsRef<str>>(treatment: &[S], values: &[f64]) -> Self {
        let mut spec = Self::new(treatment);
        spec.values = Some(spec.treatment.iter().cloned().zip(values.iter().copied()).collect());
        spec
    }

    /// Node ids of the treatment in `g`, checking that values, when given,
    /// are keyed by exactly the treatment.
    pub fn ids(&self, g: &MixedGraph) -> Result<Vec<usize>> {
        let ids = g.ids_of(&self.treatment)?;
        if let Some(v) = &self.values {
            let same = v.len() == self.treatment.len() && self.treatment.iter().all(|t| v.contains_key(t));
            if !same {
                return Err(Error::MissingValues(self.treatment.join(",")));
            }
        }
        Ok(ids)
    }
}

fn check_ids(g: &MixedGraph, ids: &[usize]) -> Result<()> {
    match ids.iter().find(|&&i| i >= g.n()) {
        Some(i) => Err(Error::UnknownNode(format!("#{i}"))),
        None => Ok(()),
    }
}

fn check_input(g: &MixedGraph, c: &[usize]) -> Result<()> {
    check_ids(g, c)?;
    if !is_chain_connected_anterial(g) {
        return Err(Error::NotChainConnectedAnterial);
    }
    Ok(())
}

/// Intervention surgery on `c`: undirected edges at a treated node point
/// away from it (or vanish between two treated nodes), and arrowheads into
/// treated nodes are removed together with their edges.
pub fn do_graph(g: &MixedGraph, c: &[usize]) -> Result<MixedGraph> {
    check_input(g, c)?;
    Ok(do_graph_unchecked(g, &ids_mask(g.n(), c)))
}

fn do_graph_unchecked(g: &MixedGraph, in_c: &[bool]) -> MixedGraph {
    let mut out = MixedGraph::empty(g.labels()).expect("labels are unique");
    for e in g.edges() {
        let head_into_c = (in_c[e.u] && e.mark_u == Mark::Head) || (in_c[e.v] && e.mark_v == Mark::Head);
        if head_into_c || (in_c[e.u] && in_c[e.v]) {
            continue;
        }
        let mark_u = if in_c[e.v] { Mark::Head } else { e.mark_u };
        let mark_v = if in_c[e.u] { Mark::Head } else { e.mark_v };
        out.set_edge(e.u, e.v, mark_u, mark_v);
    }
    out
}

/// The counterfactual graph over observational nodes and their copies
/// under `do(c)`. Copies of nodes outside `po(c)` coincide with the
/// observational node and are merged into it.
pub fn phi(g: &MixedGraph, c: &[usize]) -> Result<MixedGraph> {
    check_input(g, c)?;
    if c.is_empty() {
        return Ok(g.clone());
    }
    let n = g.n();
    let in_c = ids_mask(n, c);
    let treatment = g.labels_of(c);
    let po = g.po_mask(c);
    let dg = do_graph_unchecked(g, &in_c);

    let mut out = g.clone();
    // id of the copy of each node: its own id when merged
    let mut copy = (0..n).collect::<Vec<usize>>();
    for i in g.ordered_ids() {
        if po[i] {
            copy[i] = out.add_node(&do_label(g.label(i), &treatment)).expect("copy labels are fresh");
        }
    }
    for e in dg.edges() {
        out.set_edge(copy[e.u], copy[e.v], e.mark_u, e.mark_v);
    }

    let comp = g.component_ids();
    let add_bidirected = |out: &mut MixedGraph, a: usize, b: usize| {
        debug_assert!(matches!(out.edge_kind(a, b), None | Some(EdgeKind::Bidirected)));
        out.set_edge(a, b, Mark::Head, Mark::Head);
    };
    for i in 0..n {
        if in_c[i] || !po[i] {
            continue;
        }
        let ci = copy[i];
        add_bidirected(&mut out, ci, i);
        for j in g.sp(i) {
            add_bidirected(&mut out, ci, j);
        }
        for j in (0..n).filter(|&j| j != i && comp[j] == comp[i]) {
            add_bidirected(&mut out, ci, j);
        }
    }
    Ok(out)
}

/// The counterfactual graph with the observational posterior of `c`
/// marginalised out.
pub fn swaig(g: &MixedGraph, c: &[usize]) -> Result<MixedGraph> {
    let full = phi(g, c)?;
    if c.is_empty() {
        return Ok(full);
    }
    let in_c = ids_mask(g.n(), c);
    // observational ids are shared between g and phi(g, c)
    let m: Vec<usize> = mask_ids(&g.po_mask(c)).into_iter().filter(|&i| !in_c[i]).collect();
    alpha_m(&full, &m)
}

/// No treated node may be listed after one of its descendants.
fn check_order(g: &MixedGraph, order: &[usize]) -> Result<()> {
    for (i, &x) in order.iter().enumerate() {
        let ant = g.ant_mask(&[x]);
        if let Some(&y) = order[i + 1..].iter().find(|&&y| ant[y]) {
            let msg = if y == x {
                format!("{} listed twice", g.label(x))
            } else {
                format!("{} is an ancestor of {} but listed after it", g.label(y), g.label(x))
            };
            return Err(Error::InvalidOrder(msg));
        }
    }
    Ok(())
}

/// Single-world intervention graph of a DAG for an ordered treatment list,
/// built by merging the parallel worlds `do(x1..xi)`. Node `j` in world `i`
/// is labelled `j^do(x1,..,xi)`; world 0 keeps the plain label.
pub fn parallel_worlds_swig(g: &MixedGraph, order: &[usize]) -> Result<MixedGraph> {
    check_ids(g, order)?;
    if !is_dag(g) {
        return Err(Error::NotDag);
    }
    check_order(g, order)?;
    let n = g.n();
    let k = order.len();
    if k == 0 {
        return Ok(g.clone());
    }

    // worlds[w] = do_{x1..xw}(g), w = 0..=k
    let worlds: Vec<MixedGraph> = (0..=k).map(|w| do_graph_unchecked(g, &ids_mask(n, &order[..w]))).collect();
    let position = |j: usize| order.iter().position(|&x| x == j);

    // de[w][j]: node j of world w is kept as its own representative
    let mut de = vec![vec![false; n]; k];
    de[0] = {
        let mut strict = vec![false; n];
        for &x in order {
            for a in worlds[0].ch(x) {
                strict = or_masks(strict, worlds[0].po_mask(&[a]));
            }
        }
        strict.iter().map(|&b| !b).collect()
    };
    for w in 1..k {
        let gw = &worlds[w];
        let reach = gw.po_mask(&[order[w - 1]]);
        let mut blocked = vec![false; n];
        for &x in &order[w..] {
            for a in gw.ch(x) {
                blocked = or_masks(blocked, gw.po_mask(&[a]));
            }
        }
        de[w] = (0..n).map(|j| reach[j] && !blocked[j]).collect();
    }

    // rep[w][j] = world whose copy of j stands in for j in world w
    let mut rep: Vec<Vec<Option<usize>>> = vec![vec![None; n]; k + 1];
    for w in 0..k {
        for j in 0..n {
            if !de[w][j] || rep[w][j].is_some() {
                continue;
            }
            rep[w][j] = Some(w);
            let until = match position(j) {
                Some(l) if l + 1 > w => l + 1,
                _ => k + 1,
            };
            // x_l is fixed from world l on, so only worlds before it merge
            for r in &mut rep[w + 1..until.max(w + 1)] {
                r[j].get_or_insert(w);
            }
        }
    }
    for j in 0..n {
        rep[k][j].get_or_insert(k);
    }

    let treatment: Vec<String> = g.labels_of(order);
    let node_label = |j: usize, w: usize| do_label(g.label(j), &treatment[..w]);
    let mut out_labels = Vec::new();
    let mut kept: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (w, row) in rep.iter().enumerate() {
        for j in 0..n {
            if row[j] == Some(w) {
                kept.insert((w, j), out_labels.len());
                out_labels.push(node_label(j, w));
            }
        }
    }
    let mut out = MixedGraph::empty(&out_labels)?;
    for (w, gw) in worlds.iter().enumerate() {
        for e in gw.edges() {
            let ends = rep[w][e.u].zip(rep[w][e.v]);
            let Some((ru, rv)) = ends else { continue };
            if let (Some(&a), Some(&b)) = (kept.get(&(ru, e.u)), kept.get(&(rv, e.v))) {
                out.set_edge(a, b, e.mark_u, e.mark_v);
            }
        }
    }
    Ok(out)
}

fn or_masks(mut a: Vec<bool>, b: Vec<bool>) -> Vec<bool> {
    for (x, y) in a.iter_mut().zip(b) {
        *x |= y;
    }
    a
}
