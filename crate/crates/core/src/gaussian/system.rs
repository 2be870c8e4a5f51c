//! Compiled linear form of a model: one equation per connected part,
//! `X_τ = mean + coeff · X_pa + noise · ε`, with `ε ~ N(0, R)`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::model::GaussianModel;
use crate::classes::is_anterial;
use crate::error::{Error, Result};
use crate::graph::{EdgeKind, Mark, MixedGraph};

/// Entries at or below this magnitude count as zero when reading off graph
/// structure.
pub const STRUCTURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Equation {
    pub nodes: Vec<usize>,
    pub parents: Vec<usize>,
    /// Conditional precision of `X_τ` given its parents.
    pub precision: DMatrix<f64>,
    pub coeff: DMatrix<f64>,
    pub mean: DVector<f64>,
    /// Loading of the stacked error vector, `|τ| x dim(ε)`.
    pub noise: DMatrix<f64>,
}

impl Equation {
    /// Coefficient of each parent in the conditional mean of each node given
    /// the rest of its part: `(K B)[i, k] / K[i, i]`.
    pub fn parent_effects(&self) -> DMatrix<f64> {
        let mut d = &self.precision * &self.coeff;
        for i in 0..d.nrows() {
            let kii = self.precision[(i, i)];
            d.row_mut(i).iter_mut().for_each(|x| *x /= kii);
        }
        d
    }
}

#[derive(Debug, Clone)]
pub struct EquilibriumSystem {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    pub(crate) equations: Vec<Equation>,
    /// Intervened nodes and their fixed values.
    pub(crate) constants: Vec<(usize, f64)>,
    pub(crate) error_cov: DMatrix<f64>,
    /// Stacked error coordinates of each original part, for seeding.
    pub(crate) error_blocks: Vec<std::ops::Range<usize>>,
}

/// Splits `nodes` (local indices `0..k`) into connected components of the
/// nonzero pattern of `precision`, each in original order.
fn precision_components(precision: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let k = precision.nrows();
    let mut comp = vec![usize::MAX; k];
    let mut out = Vec::new();
    for s in 0..k {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        let mut stack = vec![s];
        let mut members = Vec::new();
        while let Some(x) = stack.pop() {
            members.push(x);
            for y in 0..k {
                if comp[y] == usize::MAX && precision[(x, y)].abs() > STRUCTURE_TOL {
                    comp[y] = id;
                    stack.push(y);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

fn select(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn select_rows(m: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

/// Pushes one equation per precision component of `eq`.
fn push_split(out: &mut Vec<Equation>, eq: Equation) {
    let comps = precision_components(&eq.precision);
    if comps.len() == 1 {
        out.push(eq);
        return;
    }
    for c in comps {
        out.push(Equation {
            nodes: c.iter().map(|&i| eq.nodes[i]).collect(),
            parents: eq.parents.clone(),
            precision: select(&eq.precision, &c, &c),
            coeff: select_rows(&eq.coeff, &c),
            mean: DVector::from_iterator(c.len(), c.iter().map(|&i| eq.mean[i])),
            noise: select_rows(&eq.noise, &c),
        });
    }
}

impl GaussianModel {
    /// Validates the model and compiles it, splitting parts whose precision
    /// pattern is disconnected.
    pub fn compile(&self) -> Result<EquilibriumSystem> {
        self.validate()?;
        let labels = self.labels();
        let index: HashMap<String, usize> = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        let off = self.error_offsets();
        let dim = off[self.parts.len()];
        let mut equations = Vec::new();
        for (p, part) in self.parts.iter().enumerate() {
            let k = part.precision_matrix()?;
            let cov = k.clone().try_inverse().ok_or(Error::SingularCovariance)?;
            let chol = cov.cholesky().ok_or(Error::SingularCovariance)?.l();
            let mut noise = DMatrix::zeros(part.nodes.len(), dim);
            noise.view_mut((0, off[p]), (part.nodes.len(), part.nodes.len())).copy_from(&chol);
            let eq = Equation {
                nodes: part.nodes.iter().map(|v| index[v]).collect(),
                parents: part.parents.iter().map(|v| index[v]).collect(),
                precision: k,
                coeff: part.coeff_matrix()?,
                mean: part.mean_vector()?,
                noise,
            };
            push_split(&mut equations, eq);
        }
        Ok(EquilibriumSystem {
            labels,
            index,
            equations,
            constants: Vec::new(),
            error_cov: self.error_covariance()?,
            error_blocks: (0..self.parts.len()).map(|p| off[p]..off[p + 1]).collect(),
        })
    }
}

impl EquilibriumSystem {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn id(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn constants(&self) -> &[(usize, f64)] {
        &self.constants
    }

    pub fn is_constant(&self, i: usize) -> bool {
        self.constants.iter().any(|&(c, _)| c == i)
    }

    /// Replaces the assignments of the treated nodes by their values. An
    /// untreated remainder `2` of a part with treated nodes `1` keeps the
    /// conditional law of `X_2` given `X_1 = a`:
    /// precision `K22`, coefficients `[B2 + H B1 | -H]` on `pa ∪ {1}`,
    /// mean `μ2 + H μ1` and noise `T2 + H T1`, where `H = K22⁻¹ K21`.
    pub fn intervene(&self, values: &[(usize, f64)]) -> Result<EquilibriumSystem> {
        let mut treated = vec![None; self.n()];
        for &(c, a) in values {
            if c >= self.n() {
                return Err(Error::UnknownNode(format!("#{c}")));
            }
            if !a.is_finite() {
                return Err(Error::MissingValues(self.labels[c].clone()));
            }
            treated[c] = Some(a);
        }
        let mut out = self.clone();
        out.equations.clear();
        out.constants.retain(|&(c, _)| treated[c].is_none());
        for &(c, a) in values {
            out.constants.push((c, a));
        }
        for eq in &self.equations {
            let (one, two): (Vec<usize>, Vec<usize>) = (0..eq.nodes.len()).partition(|&i| treated[eq.nodes[i]].is_some());
            if one.is_empty() {
                out.equations.push(eq.clone());
                continue;
            }
            if two.is_empty() {
                continue;
            }
            let k22 = select(&eq.precision, &two, &two);
            let k21 = select(&eq.precision, &two, &one);
            let h = k22.clone().try_inverse().ok_or(Error::SingularCovariance)? * k21;
            let (b1, b2) = (select_rows(&eq.coeff, &one), select_rows(&eq.coeff, &two));
            let (t1, t2) = (select_rows(&eq.noise, &one), select_rows(&eq.noise, &two));
            let mu1 = DVector::from_iterator(one.len(), one.iter().map(|&i| eq.mean[i]));
            let mu2 = DVector::from_iterator(two.len(), two.iter().map(|&i| eq.mean[i]));
            let np = eq.parents.len();
            let mut coeff = DMatrix::zeros(two.len(), np + one.len());
            coeff.view_mut((0, 0), (two.len(), np)).copy_from(&(b2 + &h * b1));
            coeff.view_mut((0, np), (two.len(), one.len())).copy_from(&(-&h));
            let mut parents = eq.parents.clone();
            parents.extend(one.iter().map(|&i| eq.nodes[i]));
            let next = Equation {
                nodes: two.iter().map(|&i| eq.nodes[i]).collect(),
                parents,
                precision: k22,
                coeff,
                mean: mu2 + &h * mu1,
                noise: t2 + &h * t1,
            };
            push_split(&mut out.equations, next);
        }
        Ok(out)
    }

    /// Intervention by label.
    pub fn intervene_labels<S: AsRef<str>>(&self, values: &[(S, f64)]) -> Result<EquilibriumSystem> {
        let ids = values.iter().map(|(l, a)| Ok((self.id(l.as_ref())?, *a))).collect::<Result<Vec<_>>>()?;
        self.intervene(&ids)
    }

    /// `X = offset + loading · ε` for every node.
    pub fn affine(&self) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.n();
        let dim = self.error_cov.nrows();
        let mut offset = DVector::zeros(n);
        let mut loading = DMatrix::zeros(n, dim);
        for &(c, a) in &self.constants {
            offset[c] = a;
        }
        // equations are in an order where parents come first
        for eq in &self.equations {
            for (r, &i) in eq.nodes.iter().enumerate() {
                let mut o = eq.mean[r];
                let mut l = eq.noise.row(r).clone_owned();
                for (c, &p) in eq.parents.iter().enumerate() {
                    let b = eq.coeff[(r, c)];
                    if b != 0.0 {
                        o += b * offset[p];
                        l += b * loading.row(p);
                    }
                }
                offset[i] = o;
                loading.set_row(i, &l);
            }
        }
        (offset, loading)
    }

    /// Noise covariance between equations `p` and `q`.
    pub(crate) fn noise_cov(&self, p: usize, q: usize) -> DMatrix<f64> {
        &self.equations[p].noise * &self.error_cov * self.equations[q].noise.transpose()
    }

    /// Graph read off the equations: undirected edges from nonzero
    /// precision entries, directed edges from parents with a nonzero effect
    /// on the conditional mean of a node given the rest of its part, and
    /// bidirected edges between all nodes of two equations whose noises are
    /// correlated.
    pub fn corresponding_graph(&self) -> Result<MixedGraph> {
        let mut g = MixedGraph::empty(&self.labels)?;
        let add = |g: &mut MixedGraph, u: usize, v: usize, kind: EdgeKind| -> Result<()> {
            match g.edge_kind(u, v) {
                Some(k) if k == kind && (kind != EdgeKind::Directed || g.marks(u, v) == Some((Mark::Tail, Mark::Head))) => Ok(()),
                Some(_) => Err(Error::NonAnterialResult),
                None => {
                    let (mu, mv) = kind.marks();
                    g.set_edge(u, v, mu, mv);
                    Ok(())
                }
            }
        };
        for eq in &self.equations {
            for a in 0..eq.nodes.len() {
                for b in a + 1..eq.nodes.len() {
                    if eq.precision[(a, b)].abs() > STRUCTURE_TOL {
                        add(&mut g, eq.nodes[a], eq.nodes[b], EdgeKind::Undirected)?;
                    }
                }
            }
            let effects = eq.parent_effects();
            for (r, &i) in eq.nodes.iter().enumerate() {
                for (c, &k) in eq.parents.iter().enumerate() {
                    if effects[(r, c)].abs() > STRUCTURE_TOL {
                        add(&mut g, k, i, EdgeKind::Directed)?;
                    }
                }
            }
        }
        for p in 0..self.equations.len() {
            for q in p + 1..self.equations.len() {
                if self.noise_cov(p, q).amax() > STRUCTURE_TOL {
                    for &i in &self.equations[p].nodes {
                        for &j in &self.equations[q].nodes {
                            add(&mut g, i, j, EdgeKind::Bidirected)?;
                        }
                    }
                }
            }
        }
        if !is_anterial(&g) {
            return Err(Error::NonAnterialResult);
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::model::GaussianPart;

    fn part(nodes: &[&str], parents: &[&str], k: &[&[f64]], b: &[&[f64]]) -> GaussianPart {
        GaussianPart {
            nodes: nodes.iter().map(|s| s.to_string()).collect(),
            parents: parents.iter().map(|s| s.to_string()).collect(),
            precision: k.iter().map(|r| r.to_vec()).collect(),
            coeff: b.iter().map(|r| r.to_vec()).collect(),
            mean: Vec::new(),
        }
    }

    fn model(parts: Vec<GaussianPart>) -> GaussianModel {
        GaussianModel { parts, error_cov: Vec::new() }
    }

    #[test]
    fn two_node_part_gives_undirected_edge() {
        let m = model(vec![part(&["1", "2"], &[], &[&[1.0, 0.5], &[0.5, 1.0]], &[])]);
        let g = m.compile().unwrap().corresponding_graph().unwrap();
        assert_eq!(g.edge_kind(0, 1), Some(EdgeKind::Undirected));
    }

    #[test]
    fn cancelled_effect_drops_parent() {
        // K = [[1, .5], [.5, 1]] on {3, 4}; B[4,1] = -K43 B[3,1] / K44 cancels x1 for node 4
        let k: &[&[f64]] = &[&[1.0, 0.5], &[0.5, 1.0]];
        let m = model(vec![
            part(&["1"], &[], &[&[1.0]], &[]),
            part(&["2"], &[], &[&[1.0]], &[]),
            part(&["3", "4"], &["1", "2"], k, &[&[0.8, 0.0], &[-0.4, 0.6]]),
        ]);
        let sys = m.compile().unwrap();
        let g = sys.corresponding_graph().unwrap();
        let id = |s| g.id(s).unwrap();
        assert_eq!(g.labels_of(&g.pa(id("4"))), ["2"]);
        assert_eq!(g.labels_of(&g.pa(id("3"))), ["1", "2"]);

        // finite difference of E[X4 | x3, x1, x2] in x1
        let eq = &sys.equations()[2];
        let cond_mean = |x1: f64, x2: f64, x3: f64| {
            let pa = DVector::from_vec(vec![x1, x2]);
            let m = &eq.mean + &eq.coeff * pa;
            m[1] - eq.precision[(1, 0)] / eq.precision[(1, 1)] * (x3 - m[0])
        };
        let h = 1e-3;
        assert!(((cond_mean(1.0 + h, 0.3, 0.2) - cond_mean(1.0, 0.3, 0.2)) / h).abs() < 1e-9);
        assert!(((cond_mean(1.0, 0.3 + h, 0.2) - cond_mean(1.0, 0.3, 0.2)) / h).abs() > 0.1);
    }

    #[test]
    fn block_diagonal_part_splits() {
        let m = model(vec![part(&["1", "2", "3"], &[], &[&[1.0, 0.0, 0.3], &[0.0, 1.0, 0.0], &[0.3, 0.0, 1.0]], &[])]);
        let sys = m.compile().unwrap();
        assert_eq!(sys.equations().len(), 2);
        let g = sys.corresponding_graph().unwrap();
        assert_eq!(g.chain_components().len(), 2);
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn coupled_parent_is_not_anterial() {
        let mut m = model(vec![part(&["1"], &[], &[&[1.0]], &[]), part(&["2"], &["1"], &[&[1.0]], &[&[1.0]])]);
        m.error_cov.push(super::super::model::ErrorCovBlock { a: 0, b: 1, block: vec![vec![0.5]] });
        assert_eq!(m.compile().unwrap().corresponding_graph().unwrap_err(), Error::NonAnterialResult);
    }

    #[test]
    fn intervening_a_parentless_singleton_fixes_it() {
        let m = model(vec![part(&["1"], &[], &[&[1.0]], &[]), part(&["2"], &["1"], &[&[1.0]], &[&[1.0]])]);
        let sys = m.compile().unwrap().intervene(&[(0, 2.5)]).unwrap();
        let (offset, loading) = sys.affine();
        assert_eq!(offset[0], 2.5);
        assert!(loading.row(0).iter().all(|&x| x == 0.0));
        assert_eq!(offset[1], 2.5);
    }
}
