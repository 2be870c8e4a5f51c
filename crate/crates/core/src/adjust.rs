//! Selection of a minimal adjustment set between a lower and an upper bound.
//!
//! The graph is first conditioned on the lower bound `L` and marginalised
//! down to `U ∪ {c, o}`. If the treatment and outcome are adjacent once that
//! graph is maximised, no set works. Otherwise nodes of `U \ L` are
//! marginalised one at a time, in label order, as long as the maximised
//! result keeps `c` and `o` apart.

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::graph::MixedGraph;
use crate::inducing::maximize;
use crate::label::{label_cmp, sort_labels, NodeLabel};
use crate::separation::separated;
use crate::transforms::{alpha_c, alpha_m};

/// Largest `|S \ L|` for which `verify_adjustment` enumerates subsets.
pub const EXACT_CHECK_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustmentProblem {
    pub graph: MixedGraph,
    pub treatment: Vec<String>,
    pub outcome: Vec<String>,
    pub lower: Vec<String>,
    pub upper: Vec<String>,
}

fn owned<S: AsRef<str>>(xs: &[S]) -> Vec<String> {
    xs.iter().map(|s| s.as_ref().to_string()).collect()
}

impl AdjustmentProblem {
    pub fn new<S: AsRef<str>, T: AsRef<str>>(graph: MixedGraph, treatment: &str, outcome: &str, lower: &[S], upper: &[T]) -> Self {
        AdjustmentProblem { graph, treatment: vec![treatment.to_string()], outcome: vec![outcome.to_string()], lower: owned(lower), upper: owned(upper) }
    }

    /// Drops intervened (superscripted) labels from the upper bound.
    pub fn observational_only(mut self) -> Self {
        self.upper.retain(|l| NodeLabel::parse(l).is_observational());
        self
    }

    fn pair(&self) -> Result<(&str, &str)> {
        match (&self.treatment[..], &self.outcome[..]) {
            ([c], [o]) => Ok((c, o)),
            _ => Err(Error::SetValuedTreatment),
        }
    }

    /// Checks the bounds and returns the treatment and outcome labels.
    fn check(&self) -> Result<(&str, &str)> {
        let (c, o) = self.pair()?;
        let bad = |m: String| Err(Error::InvalidProblem(m));
        for l in [c, o].into_iter().chain(self.lower.iter().map(|s| s.as_str())).chain(self.upper.iter().map(|s| s.as_str())) {
            if self.graph.id(l).is_none() {
                return bad(format!("unknown node `{l}`"));
            }
        }
        if c == o {
            return bad("treatment and outcome coincide".into());
        }
        if let Some(l) = self.lower.iter().find(|l| !self.upper.contains(l)) {
            return bad(format!("`{l}` is in the lower bound but not the upper bound"));
        }
        if self.upper.iter().any(|u| u == c || u == o) {
            return bad("treatment and outcome must lie outside the bounds".into());
        }
        Ok((c, o))
    }
}

/// One committed removal and the graph it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub removed: String,
    pub edges: Vec<String>,
}

impl Serialize for TraceStep {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TraceStep", 2)?;
        st.serialize_field("removed", &self.removed)?;
        st.serialize_field("edges", &self.edges)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Feasible(Vec<String>),
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustmentResult {
    pub verdict: Verdict,
    pub trace: Vec<TraceStep>,
}

impl AdjustmentResult {
    pub fn set(&self) -> Option<&[String]> {
        match &self.verdict {
            Verdict::Feasible(s) => Some(s),
            Verdict::Infeasible => None,
        }
    }
}

impl Serialize for AdjustmentResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("AdjustmentResult", 3)?;
        let name = if self.set().is_some() { "feasible" } else { "infeasible" };
        st.serialize_field("outcome", name)?;
        st.serialize_field("S", &self.set())?;
        st.serialize_field("trace", &self.trace)?;
        st.end()
    }
}

fn ids_in(g: &MixedGraph, labels: &[String]) -> Vec<usize> {
    labels.iter().filter_map(|l| g.id(l)).collect()
}

fn apart(g: &MixedGraph, c: &str, o: &str, maximal: bool) -> Result<bool> {
    let (i, j) = (g.id_of(c)?, g.id_of(o)?);
    if maximal {
        Ok(!maximize(g)?.adjacent(i, j))
    } else {
        Ok(!g.adjacent(i, j))
    }
}

pub(crate) fn run(p: &AdjustmentProblem, maximal: bool) -> Result<AdjustmentResult> {
    let (c, o) = p.check()?;
    let conditioned = alpha_c(&p.graph, &ids_in(&p.graph, &p.lower))?;
    let outside: Vec<usize> =
        (0..conditioned.n()).filter(|&v| { let l = conditioned.label(v); l != c && l != o && !p.upper.iter().any(|u| u == l) }).collect();
    let mut current = alpha_m(&conditioned, &outside)?;
    let mut trace = Vec::new();
    if !apart(&current, c, o, maximal)? {
        return Ok(AdjustmentResult { verdict: Verdict::Infeasible, trace });
    }
    let mut s = p.upper.clone();
    sort_labels(&mut s);
    'shrink: loop {
        for i in s.iter().filter(|i| !p.lower.contains(i)) {
            let next = alpha_m(&current, &[current.id_of(i)?])?;
            if apart(&next, c, o, maximal)? {
                trace.push(TraceStep { removed: i.clone(), edges: next.edge_strings() });
                let removed = i.clone();
                s.retain(|x| *x != removed);
                current = next;
                continue 'shrink;
            }
        }
        break;
    }
    Ok(AdjustmentResult { verdict: Verdict::Feasible(s), trace })
}

/// Minimal set `S` with `L ⊆ S ⊆ U` separating treatment and outcome, or
/// `Infeasible` when none exists.
pub fn select_adjustment(p: &AdjustmentProblem) -> Result<AdjustmentResult> {
    run(p, true)
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct VerifyReport {
    pub within_bounds: bool,
    pub separates: bool,
    pub minimal: bool,
    /// A smaller separating set containing `L ∩ S`, when one exists.
    pub smaller: Option<Vec<String>>,
}

impl VerifyReport {
    pub fn passes(&self) -> bool {
        self.within_bounds && self.separates && self.minimal
    }
}

fn separates(g: &MixedGraph, c: usize, o: usize, s: &[usize]) -> Result<bool> {
    if s.contains(&c) || s.contains(&o) {
        return Ok(false);
    }
    separated(g, &[c], &[o], s)
}

/// Checks bounds, separation and minimality of `s` by enumerating every
/// proper subset that keeps the lower-bound elements of `s`.
pub fn verify_adjustment<S: AsRef<str>>(p: &AdjustmentProblem, s: &[S]) -> Result<VerifyReport> {
    let (c, o) = p.pair()?;
    let g = &p.graph;
    let (ci, oi) = (g.id_of(c)?, g.id_of(o)?);
    let mut s = owned(s);
    s.sort_by(|a, b| label_cmp(a, b));
    s.dedup();
    let ids = g.ids_of(&s)?;
    let within_bounds = p.lower.iter().all(|l| s.contains(l)) && s.iter().all(|x| p.upper.contains(x));
    let (fixed, free): (Vec<usize>, Vec<usize>) = ids.iter().partition(|&&v| p.lower.iter().any(|l| l == g.label(v)));
    if free.len() > EXACT_CHECK_LIMIT {
        return Err(Error::TooLargeForExactCheck(free.len()));
    }
    let mut smaller = None;
    for bits in 0u32..(1u32 << free.len()) - 1 {
        let mut sub = fixed.clone();
        sub.extend((0..free.len()).filter(|k| bits >> k & 1 == 1).map(|k| free[k]));
        if separates(g, ci, oi, &sub)? {
            g.sort_ids(&mut sub);
            smaller = Some(g.labels_of(&sub));
            break;
        }
    }
    Ok(VerifyReport { within_bounds, separates: separates(g, ci, oi, &ids)?, minimal: smaller.is_none(), smaller })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeKind::*;

    fn graph(labels: &[&str], edges: &[(&str, &str, crate::EdgeKind)]) -> MixedGraph {
        MixedGraph::build(labels, edges).unwrap()
    }

    #[test]
    fn single_confounder_is_selected() {
        let g = graph(&["c", "z", "o"], &[("z", "c", Directed), ("z", "o", Directed)]);
        let r = select_adjustment(&AdjustmentProblem::new(g, "c", "o", &[] as &[&str], &["z"])).unwrap();
        assert_eq!(r.verdict, Verdict::Feasible(vec!["z".into()]));
        assert!(r.trace.is_empty());
    }

    #[test]
    fn adjacent_pair_is_infeasible() {
        let g = graph(&["c", "z", "o"], &[("c", "o", Directed), ("z", "o", Directed)]);
        for (l, u) in [(vec![], vec!["z"]), (vec!["z"], vec!["z"])] {
            let r = select_adjustment(&AdjustmentProblem::new(g.clone(), "c", "o", &l, &u)).unwrap();
            assert_eq!(r.verdict, Verdict::Infeasible);
        }
    }

    #[test]
    fn redundant_nodes_are_removed_in_label_order() {
        // both 1 and 2 block the back-door path; 1 comes first and goes
        let g = graph(&["1", "2", "3", "c", "o"], &[("3", "1", Directed), ("1", "2", Directed), ("2", "c", Directed), ("3", "o", Directed)]);
        let r = select_adjustment(&AdjustmentProblem::new(g, "c", "o", &[] as &[&str], &["1", "2", "3"])).unwrap();
        assert_eq!(r.verdict, Verdict::Feasible(vec!["3".into()]));
        assert_eq!(r.trace.iter().map(|t| t.removed.as_str()).collect::<Vec<_>>(), ["1", "2"]);
    }

    #[test]
    fn problem_checks() {
        let g = graph(&["c", "z", "o"], &[]);
        let p = |l: &[&str], u: &[&str]| AdjustmentProblem::new(g.clone(), "c", "o", l, u);
        assert!(matches!(select_adjustment(&p(&["z"], &[])), Err(Error::InvalidProblem(_))));
        assert!(matches!(select_adjustment(&p(&[], &["c"])), Err(Error::InvalidProblem(_))));
        assert!(matches!(select_adjustment(&p(&[], &["q"])), Err(Error::InvalidProblem(_))));
        let mut set = p(&[], &["z"]);
        set.treatment.push("z".into());
        assert_eq!(select_adjustment(&set), Err(Error::SetValuedTreatment));
    }

    #[test]
    fn observational_only_drops_intervened_labels() {
        let g = graph(&["1", "2", "2^do(1)"], &[]);
        let p = AdjustmentProblem::new(g, "1", "2^do(1)", &[] as &[&str], &["2", "3^do(1)"]).observational_only();
        assert_eq!(p.upper, ["2"]);
    }

    #[test]
    fn verification_flags_redundancy_and_missing_lower_bound() {
        let g = graph(&["c", "z", "w", "o"], &[("z", "c", Directed), ("z", "o", Directed), ("w", "o", Directed)]);
        let p = AdjustmentProblem::new(g.clone(), "c", "o", &[] as &[&str], &["z", "w"]);
        let full = verify_adjustment(&p, &["z", "w"]).unwrap();
        assert!(full.within_bounds && full.separates && !full.minimal);
        assert_eq!(full.smaller, Some(vec!["z".to_string()]));
        let r = select_adjustment(&p).unwrap();
        assert!(verify_adjustment(&p, r.set().unwrap()).unwrap().passes());
        let q = AdjustmentProblem::new(g, "c", "o", &["w"], &["z", "w"]);
        let missing = verify_adjustment(&q, &["z"]).unwrap();
        assert!(!missing.within_bounds && missing.separates);
    }

    #[test]
    fn result_json_shape() {
        let r = AdjustmentResult { verdict: Verdict::Infeasible, trace: vec![] };
        assert_eq!(serde_json::to_string(&r).unwrap(), r#"{"outcome":"infeasible","S":null,"trace":[]}"#);
    }
}
