//! Mixed graphs with directed, undirected and bidirected edges.
//!
//! An edge is a pair of end marks. Tail–tail is undirected, tail–head is
//! directed (stored tail first), head–head is bidirected. At most one edge
//! joins a pair of nodes.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::label::label_cmp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mark {
    Tail,
    Head,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    /// `u --> v`
    Directed,
    /// `u --- v`
    Undirected,
    /// `u <-> v`
    Bidirected,
}

impl EdgeKind {
    pub fn marks(self) -> (Mark, Mark) {
        match self {
            EdgeKind::Directed => (Mark::Tail, Mark::Head),
            EdgeKind::Undirected => (Mark::Tail, Mark::Tail),
            EdgeKind::Bidirected => (Mark::Head, Mark::Head),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            EdgeKind::Directed => "-->",
            EdgeKind::Undirected => "---",
            EdgeKind::Bidirected => "<->",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "-->" => Some(EdgeKind::Directed),
            "---" => Some(EdgeKind::Undirected),
            "<->" => Some(EdgeKind::Bidirected),
            _ => None,
        }
    }
}

/// An edge between node ids `u` and `v` with the mark at each end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub mark_u: Mark,
    pub mark_v: Mark,
}

impl Edge {
    pub fn new(u: usize, v: usize, kind: EdgeKind) -> Self {
        let (mark_u, mark_v) = kind.marks();
        Edge { u, v, mark_u, mark_v }
    }

    pub fn with_marks(u: usize, v: usize, mark_u: Mark, mark_v: Mark) -> Self {
        Edge { u, v, mark_u, mark_v }
    }

    pub fn kind(&self) -> EdgeKind {
        match (self.mark_u, self.mark_v) {
            (Mark::Tail, Mark::Tail) => EdgeKind::Undirected,
            (Mark::Head, Mark::Head) => EdgeKind::Bidirected,
            _ => EdgeKind::Directed,
        }
    }

    /// Same edge with directed edges stored tail first.
    pub fn canonical(self) -> Self {
        if self.mark_u == Mark::Head && self.mark_v == Mark::Tail {
            Edge { u: self.v, v: self.u, mark_u: Mark::Tail, mark_v: Mark::Head }
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Adj {
    pub node: usize,
    /// Mark at the owning node.
    pub near: Mark,
    /// Mark at `node`.
    pub far: Mark,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// Undirected neighbours.
    Ne,
    /// Parents (tails of directed edges into the set).
    Pa,
    /// Anterior: nodes with a semi-directed path into the set.
    Ant,
    /// Strict anterior: anterior minus the chain components of the set.
    Sant,
    /// Posterior: nodes reachable from the set by a semi-directed path.
    Po,
}

#[derive(Debug, Clone)]
pub struct MixedGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<Adj>>,
}

impl PartialEq for MixedGraph {
    /// Equal node label sets and equal labelled edge sets.
    fn eq(&self, other: &Self) -> bool {
        if self.n() != other.n() || self.labels.iter().any(|l| !other.index.contains_key(l)) {
            return false;
        }
        self.labelled_edges() == other.labelled_edges()
    }
}

impl MixedGraph {
    /// Graph with the given nodes and no edges.
    pub fn empty<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let mut g = MixedGraph { labels: Vec::new(), index: HashMap::new(), adj: Vec::new() };
        for l in labels {
            g.add_node(l.as_ref())?;
        }
        Ok(g)
    }

    /// Builds and validates a graph from labels and `(u, v, kind)` triples.
    pub fn build<S: AsRef<str>, T: AsRef<str>>(labels: &[S], edges: &[(T, T, EdgeKind)]) -> Result<Self> {
        let mut g = Self::empty(labels)?;
        for (u, v, kind) in edges {
            let a = g.id_of(u.as_ref())?;
            let b = g.id_of(v.as_ref())?;
            g.try_insert(Edge::new(a, b, *kind))?;
        }
        Ok(g)
    }

    /// Builds a graph from labels and id-based edges.
    pub fn from_edges<S: AsRef<str>>(labels: &[S], edges: &[Edge]) -> Result<Self> {
        let mut g = Self::empty(labels)?;
        for e in edges {
            if e.u >= g.n() || e.v >= g.n() {
                return Err(Error::UnknownNode(format!("#{}", e.u.max(e.v))));
            }
            g.try_insert(*e)?;
        }
        Ok(g)
    }

    pub(crate) fn add_node(&mut self, label: &str) -> Result<usize> {
        if self.index.contains_key(label) {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
        let id = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        self.adj.push(Vec::new());
        Ok(id)
    }

    pub(crate) fn try_insert(&mut self, e: Edge) -> Result<()> {
        if e.u == e.v {
            return Err(Error::SelfLoop(self.labels[e.u].clone()));
        }
        if self.adjacent(e.u, e.v) {
            return Err(Error::DuplicateEdge(self.labels[e.u].clone(), self.labels[e.v].clone()));
        }
        self.set_edge(e.u, e.v, e.mark_u, e.mark_v);
        Ok(())
    }

    /// Inserts or replaces the edge between `u` and `v`.
    pub(crate) fn set_edge(&mut self, u: usize, v: usize, mark_u: Mark, mark_v: Mark) {
        debug_assert!(u != v);
        self.remove_edge(u, v);
        let pu = self.adj[u].partition_point(|a| a.node < v);
        self.adj[u].insert(pu, Adj { node: v, near: mark_u, far: mark_v });
        let pv = self.adj[v].partition_point(|a| a.node < u);
        self.adj[v].insert(pv, Adj { node: u, near: mark_v, far: mark_u });
    }

    pub(crate) fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if let Ok(p) = self.adj[u].binary_search_by_key(&v, |a| a.node) {
            self.adj[u].remove(p);
            let q = self.adj[v].binary_search_by_key(&u, |a| a.node).expect("adjacency index out of sync");
            self.adj[v].remove(q);
            true
        } else {
            false
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn id_of(&self, label: &str) -> Result<usize> {
        self.id(label).ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    pub fn ids_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.id_of(l.as_ref())).collect()
    }

    pub fn labels_of(&self, ids: &[usize]) -> Vec<String> {
        ids.iter().map(|&i| self.labels[i].clone()).collect()
    }

    /// Node ids in label order.
    pub fn ordered_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.n()).collect();
        self.sort_ids(&mut ids);
        ids
    }

    pub fn sort_ids(&self, ids: &mut [usize]) {
        ids.sort_by(|&a, &b| label_cmp(&self.labels[a], &self.labels[b]));
    }

    pub(crate) fn adj(&self, i: usize) -> &[Adj] {
        &self.adj[i]
    }

    /// Marks of the edge between `i` and `j` as (mark at i, mark at j).
    pub fn marks(&self, i: usize, j: usize) -> Option<(Mark, Mark)> {
        self.adj[i].binary_search_by_key(&j, |a| a.node).ok().map(|p| (self.adj[i][p].near, self.adj[i][p].far))
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.marks(i, j).is_some()
    }

    pub fn edge_kind(&self, i: usize, j: usize) -> Option<EdgeKind> {
        self.marks(i, j).map(|(a, b)| Edge::with_marks(i, j, a, b).kind())
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    /// All edges, directed ones tail first, others with `u < v`.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (i, list) in self.adj.iter().enumerate() {
            for a in list {
                let e = Edge::with_marks(i, a.node, a.near, a.far);
                let keep = match e.kind() {
                    EdgeKind::Directed => a.near == Mark::Tail,
                    _ => i < a.node,
                };
                if keep {
                    out.push(e);
                }
            }
        }
        out
    }

    /// Edges keyed by labels; undirected and bidirected pairs in label order.
    pub fn labelled_edges(&self) -> BTreeSet<(String, String, EdgeKind)> {
        self.edges()
            .into_iter()
            .map(|e| {
                let (mut a, mut b) = (self.labels[e.u].clone(), self.labels[e.v].clone());
                if e.kind() != EdgeKind::Directed && label_cmp(&a, &b) == std::cmp::Ordering::Greater {
                    std::mem::swap(&mut a, &mut b);
                }
                (a, b, e.kind())
            })
            .collect()
    }

    /// `labelled_edges` written as `a-->b`, `a---b` or `a<->b`.
    pub fn edge_strings(&self) -> Vec<String> {
        self.labelled_edges().into_iter().map(|(a, b, k)| format!("{a}{}{b}", k.symbol())).collect()
    }

    /// Parents of `i`.
    pub fn pa(&self, i: usize) -> Vec<usize> {
        self.adj[i].iter().filter(|a| a.near == Mark::Head && a.far == Mark::Tail).map(|a| a.node).collect()
    }

    /// Children of `i`.
    pub fn ch(&self, i: usize) -> Vec<usize> {
        self.adj[i].iter().filter(|a| a.near == Mark::Tail && a.far == Mark::Head).map(|a| a.node).collect()
    }

    /// Undirected neighbours of `i`.
    pub fn ne(&self, i: usize) -> Vec<usize> {
        self.adj[i].iter().filter(|a| a.near == Mark::Tail && a.far == Mark::Tail).map(|a| a.node).collect()
    }

    /// Bidirected neighbours of `i`.
    pub fn sp(&self, i: usize) -> Vec<usize> {
        self.adj[i].iter().filter(|a| a.near == Mark::Head && a.far == Mark::Head).map(|a| a.node).collect()
    }

    /// Nodes with a semi-directed path into `seeds`, seeds included.
    pub fn ant_mask(&self, seeds: &[usize]) -> Vec<bool> {
        // walk edges backwards: y -- x or y --> x puts y in ant(x)
        self.closure(seeds, |a| a.far == Mark::Tail)
    }

    /// Nodes reachable from `seeds` by a semi-directed path, seeds included.
    pub fn po_mask(&self, seeds: &[usize]) -> Vec<bool> {
        // x -- y or x --> y puts y in po(x)
        self.closure(seeds, |a| a.near == Mark::Tail)
    }

    fn closure(&self, seeds: &[usize], step: impl Fn(&Adj) -> bool) -> Vec<bool> {
        let mut mask = vec![false; self.n()];
        let mut stack: Vec<usize> = Vec::with_capacity(self.n());
        for &s in seeds {
            if !mask[s] {
                mask[s] = true;
                stack.push(s);
            }
        }
        while let Some(x) = stack.pop() {
            for a in &self.adj[x] {
                if !mask[a.node] && step(a) {
                    mask[a.node] = true;
                    stack.push(a.node);
                }
            }
        }
        mask
    }

    /// Relatives of `c`, excluding `c` itself, in label order.
    pub fn relatives(&self, c: &[usize], kind: Relation) -> Vec<usize> {
        let mut inset = vec![false; self.n()];
        for &x in c {
            inset[x] = true;
        }
        let mut out: Vec<usize> = match kind {
            Relation::Ne => c.iter().flat_map(|&x| self.ne(x)).collect(),
            Relation::Pa => c.iter().flat_map(|&x| self.pa(x)).collect(),
            Relation::Ant => mask_ids(&self.ant_mask(c)),
            Relation::Po => mask_ids(&self.po_mask(c)),
            Relation::Sant => {
                let comp = self.component_ids();
                let comps: BTreeSet<usize> = c.iter().map(|&x| comp[x]).collect();
                mask_ids(&self.ant_mask(c)).into_iter().filter(|&y| !comps.contains(&comp[y])).collect()
            }
        };
        out.retain(|&y| !inset[y]);
        out.sort_unstable();
        out.dedup();
        self.sort_ids(&mut out);
        out
    }

    /// Chain components: connected components of the undirected part, in
    /// order of their smallest label; members in label order.
    pub fn chain_components(&self) -> Vec<Vec<usize>> {
        let comp = self.component_ids();
        let k = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut out = vec![Vec::new(); k];
        for i in self.ordered_ids() {
            out[comp[i]].push(i);
        }
        out.sort_by(|a, b| label_cmp(&self.labels[a[0]], &self.labels[b[0]]));
        out
    }

    /// Component index per node (arbitrary but stable numbering).
    pub fn component_ids(&self) -> Vec<usize> {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for a in &self.adj[x] {
                    if a.near == Mark::Tail && a.far == Mark::Tail && comp[a.node] == usize::MAX {
                        comp[a.node] = next;
                        queue.push_back(a.node);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// The chain component containing `i`.
    pub fn tau(&self, i: usize) -> Vec<usize> {
        let comp = self.component_ids();
        let mut out: Vec<usize> = (0..self.n()).filter(|&j| comp[j] == comp[i]).collect();
        self.sort_ids(&mut out);
        out
    }

    /// Subgraph induced by the nodes with `keep[i]`, labels preserved.
    pub fn induced(&self, keep: &[bool]) -> MixedGraph {
        let ids: Vec<usize> = (0..self.n()).filter(|&i| keep[i]).collect();
        let mut g = MixedGraph::empty(&self.labels_of(&ids)).expect("labels are unique");
        for e in self.edges() {
            if keep[e.u] && keep[e.v] {
                let (a, b) = (g.id(&self.labels[e.u]).unwrap(), g.id(&self.labels[e.v]).unwrap());
                g.set_edge(a, b, e.mark_u, e.mark_v);
            }
        }
        g
    }

    /// Consistency of the adjacency index with the edge set.
    pub fn check_index(&self) -> bool {
        let rebuilt = MixedGraph::from_edges(&self.labels, &self.edges());
        match rebuilt {
            Ok(r) => r.adj == self.adj,
            Err(_) => false,
        }
    }
}

pub(crate) fn mask_ids(mask: &[bool]) -> Vec<usize> {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

pub(crate) fn ids_mask(n: usize, ids: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &i in ids {
        m[i] = true;
    }
    m
}
