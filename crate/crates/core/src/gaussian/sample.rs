//! Seeded samplers. Every record draws its error blocks, and every Gibbs
//! chain its updates, from its own ChaCha stream, so a record does not
//! depend on how many records precede it.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::system::{Equation, EquilibriumSystem};
use crate::error::{Error, Result};
use crate::label::do_label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Equilibrium,
    Gibbs,
    Coupled,
}

/// Rows are records, columns are labelled nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    pub labels: Vec<String>,
    pub data: DMatrix<f64>,
    pub provenance: Provenance,
}

impl SampleMatrix {
    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn column(&self, label: &str) -> Result<Vec<f64>> {
        let j = self.labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownNode(label.to_string()))?;
        Ok(self.data.column(j).iter().copied().collect())
    }
}

fn stream(seed: u64, record: usize, unit: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((record as u64) << 24) | unit as u64);
    rng
}

/// `F` with `F Fᵀ = R`, for drawing the stacked errors.
fn error_factor(r: &DMatrix<f64>) -> DMatrix<f64> {
    if let Some(c) = r.clone().cholesky() {
        return c.l();
    }
    let eig = r.clone().symmetric_eigen();
    let sqrt = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&x| x.max(0.0).sqrt()));
    &eig.eigenvectors * DMatrix::from_diagonal(&sqrt)
}

/// One draw of the stacked error vector for `record`.
fn draw_errors(sys: &EquilibriumSystem, factor: &DMatrix<f64>, seed: u64, record: usize) -> DVector<f64> {
    let mut z = DVector::zeros(factor.ncols());
    for (b, range) in sys.error_blocks.iter().enumerate() {
        let mut rng = stream(seed, record, b);
        for k in range.clone() {
            z[k] = rng.sample(StandardNormal);
        }
    }
    factor * z
}

/// Evaluates the equations in order for one error draw.
fn evaluate(sys: &EquilibriumSystem, eps: &DVector<f64>, x: &mut [f64]) {
    for &(c, a) in sys.constants() {
        x[c] = a;
    }
    for eq in sys.equations() {
        for (r, &i) in eq.nodes.iter().enumerate() {
            let mut v = eq.mean[r];
            for (c, &p) in eq.parents.iter().enumerate() {
                v += eq.coeff[(r, c)] * x[p];
            }
            v += eq.noise.row(r).dot(&eps.transpose());
            x[i] = v;
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::TooFewSamples { n, k: 0 });
    }
    Ok(())
}

/// Draws the errors and applies the assignments in part order.
pub fn sample_equilibrium(sys: &EquilibriumSystem, n: usize, seed: u64) -> Result<SampleMatrix> {
    check_n(n)?;
    let factor = error_factor(&sys.error_cov);
    let mut data = DMatrix::zeros(n, sys.n());
    let mut x = vec![0.0; sys.n()];
    for rec in 0..n {
        let eps = draw_errors(sys, &factor, seed, rec);
        evaluate(sys, &eps, &mut x);
        data.row_mut(rec).copy_from_slice(&x);
    }
    Ok(SampleMatrix { labels: sys.labels().to_vec(), data, provenance: Provenance::Equilibrium })
}

/// Observational and intervened worlds from the same error draw per record.
/// Columns are the observational labels followed by `i^do(C)` for every node.
pub fn sample_coupled(sys: &EquilibriumSystem, values: &[(usize, f64)], n: usize, seed: u64) -> Result<SampleMatrix> {
    check_n(n)?;
    let treated = sys.intervene(values)?;
    let factor = error_factor(&sys.error_cov);
    let v = sys.n();
    let mut data = DMatrix::zeros(n, 2 * v);
    let (mut x, mut y) = (vec![0.0; v], vec![0.0; v]);
    for rec in 0..n {
        let eps = draw_errors(sys, &factor, seed, rec);
        evaluate(sys, &eps, &mut x);
        evaluate(&treated, &eps, &mut y);
        for i in 0..v {
            data[(rec, i)] = x[i];
            data[(rec, v + i)] = y[i];
        }
    }
    let names: Vec<String> = values.iter().map(|&(c, _)| sys.labels()[c].clone()).collect();
    let mut labels = sys.labels().to_vec();
    labels.extend(sys.labels().iter().map(|l| do_label(l, &names)));
    Ok(SampleMatrix { labels, data, provenance: Provenance::Coupled })
}

/// Target of the Gibbs chain for one equation: `X_τ | x_pa` shifted by the
/// noise already realised in earlier equations it is correlated with.
#[derive(Debug, Clone)]
pub(crate) struct GibbsTarget {
    /// Precision of the chain's target law.
    pub precision: DMatrix<f64>,
    /// Regression of this equation's noise on the earlier noises.
    pub gain: Option<DMatrix<f64>>,
}

pub(crate) fn gibbs_targets(sys: &EquilibriumSystem) -> Result<Vec<GibbsTarget>> {
    let eqs = sys.equations();
    let mut offsets = vec![0];
    for e in eqs {
        offsets.push(offsets.last().unwrap() + e.nodes.len());
    }
    // covariance of the stacked noises of all equations
    let total = offsets[eqs.len()];
    let mut all = DMatrix::zeros(total, total);
    for p in 0..eqs.len() {
        for q in 0..eqs.len() {
            let b = sys.noise_cov(p, q);
            all.view_mut((offsets[p], offsets[q]), (b.nrows(), b.ncols())).copy_from(&b);
        }
    }
    let mut out = Vec::with_capacity(eqs.len());
    for (p, eq) in eqs.iter().enumerate() {
        let (start, k) = (offsets[p], eq.nodes.len());
        let cross = all.view((start, 0), (k, start)).clone_owned();
        if cross.iter().all(|&x| x == 0.0) {
            out.push(GibbsTarget { precision: eq.precision.clone(), gain: None });
            continue;
        }
        let before = all.view((0, 0), (start, start)).clone_owned();
        let inv = before.pseudo_inverse(1e-12).map_err(|_| Error::SingularCovariance)?;
        let gain = &cross * inv;
        let cov = all.view((start, start), (k, k)) - &gain * cross.transpose();
        let precision = cov.try_inverse().ok_or(Error::SingularCovariance)?;
        out.push(GibbsTarget { precision: (&precision + precision.transpose()) * 0.5, gain: Some(gain) });
    }
    Ok(out)
}

/// Mean and standard deviation of coordinate `m` of `N(mean, precision⁻¹)`
/// given the other coordinates of `state`.
pub(crate) fn site_conditional(state: &[f64], mean: &[f64], precision: &DMatrix<f64>, m: usize) -> (f64, f64) {
    let pmm = precision[(m, m)];
    let mut shift = 0.0;
    for j in 0..state.len() {
        if j != m {
            shift += precision[(m, j)] * (state[j] - mean[j]);
        }
    }
    (mean[m] - shift / pmm, 1.0 / pmm.sqrt())
}

/// One cyclic sweep of single-site updates towards `N(mean, precision⁻¹)`.
pub(crate) fn sweep(state: &mut [f64], mean: &[f64], precision: &DMatrix<f64>, rng: &mut impl Rng) {
    for m in 0..state.len() {
        let (mu, sd) = site_conditional(state, mean, precision, m);
        let z: f64 = rng.sample(StandardNormal);
        state[m] = mu + sd * z;
    }
}

/// `mean + coeff · x_pa` for one equation.
pub(crate) fn parent_mean(eq: &Equation, x: &[f64]) -> Vec<f64> {
    (0..eq.nodes.len())
        .map(|r| eq.mean[r] + eq.parents.iter().enumerate().map(|(c, &q)| eq.coeff[(r, c)] * x[q]).sum::<f64>())
        .collect()
}

/// Per record, each equation runs its own Gibbs chain from zero given the
/// record's parent values; the state after `burn_in` discarded sweeps and
/// one further sweep is kept.
pub fn gibbs_sample(sys: &EquilibriumSystem, n: usize, burn_in: usize, seed: u64) -> Result<SampleMatrix> {
    check_n(n)?;
    let targets = gibbs_targets(sys)?;
    let eqs = sys.equations();
    let mut data = DMatrix::zeros(n, sys.n());
    let mut x = vec![0.0; sys.n()];
    for rec in 0..n {
        for &(c, a) in sys.constants() {
            x[c] = a;
        }
        // realised noise of the equations sampled so far
        let mut noise: Vec<f64> = Vec::new();
        for (p, (eq, target)) in eqs.iter().zip(&targets).enumerate() {
            let k = eq.nodes.len();
            let base = parent_mean(eq, &x);
            let mut mean = base.clone();
            if let Some(gain) = &target.gain {
                let shift = gain * DVector::from_column_slice(&noise);
                for r in 0..k {
                    mean[r] += shift[r];
                }
            }
            let mut rng = stream(seed, rec, p);
            let mut state = vec![0.0; k];
            if k == 1 {
                let z: f64 = rng.sample(StandardNormal);
                state[0] = mean[0] + z / target.precision[(0, 0)].sqrt();
            } else {
                for _ in 0..=burn_in {
                    sweep(&mut state, &mean, &target.precision, &mut rng);
                }
            }
            for (r, &i) in eq.nodes.iter().enumerate() {
                x[i] = state[r];
                noise.push(state[r] - base[r]);
            }
        }
        data.row_mut(rec).copy_from_slice(&x);
    }
    Ok(SampleMatrix { labels: sys.labels().to_vec(), data, provenance: Provenance::Gibbs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::random::{random_model, shipped_models};
    use crate::gaussian::{GaussianModel, GaussianPart};

    fn spd3() -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[2.0, 0.6, -0.3, 0.6, 1.5, 0.4, -0.3, 0.4, 1.2])
    }

    #[test]
    fn single_record_is_reproducible() {
        let sys = shipped_models()[0].1.compile().unwrap();
        let a = sample_equilibrium(&sys, 1, 7).unwrap();
        assert_eq!(a, sample_equilibrium(&sys, 1, 7).unwrap());
        assert_ne!(a, sample_equilibrium(&sys, 1, 8).unwrap());
        assert_eq!(sample_equilibrium(&sys, 0, 7), Err(Error::TooFewSamples { n: 0, k: 0 }));
    }

    #[test]
    fn records_do_not_depend_on_sample_size() {
        let sys = shipped_models()[2].1.compile().unwrap();
        let short = gibbs_sample(&sys, 5, 20, 3).unwrap();
        let long = gibbs_sample(&sys, 40, 20, 3).unwrap();
        assert_eq!(short.data, long.data.rows(0, 5).clone_owned());
    }

    /// The site update is `x' = A x + b + sd e_m z`. With `S = K⁻¹` it keeps
    /// `N(mean, S)` and the pair `(x, x')` is exchangeable: `Cov(x') = S`
    /// and `Cov(x, x') = S Aᵀ` is symmetric.
    #[test]
    fn site_update_is_reversible_for_its_target() {
        let k = spd3();
        let s = k.clone().try_inverse().unwrap();
        let mean = [0.5, -1.0, 2.0];
        for m in 0..3 {
            let (b, sd) = site_conditional(&[0.0; 3], &mean, &k, m);
            let mut a = DMatrix::<f64>::identity(3, 3);
            for j in 0..3 {
                let mut e = [0.0; 3];
                e[j] = 1.0;
                a[(m, j)] = site_conditional(&e, &mean, &k, m).0 - b;
            }
            // the fixed point of the mean map is the target mean
            let moved: f64 = (0..3).map(|j| a[(m, j)] * mean[j]).sum::<f64>() + b;
            assert!((moved - mean[m]).abs() < 1e-12);
            let mut next = &a * &s * a.transpose();
            next[(m, m)] += sd * sd;
            assert!((&next - &s).amax() < 1e-12);
            let cross = &s * a.transpose();
            assert!((&cross - cross.transpose()).amax() < 1e-12);
        }
    }

    #[test]
    fn full_conditional_uses_only_neighbours_and_parents() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let sys = random_model(&mut rng, 7).compile().unwrap();
            let g = sys.corresponding_graph().unwrap();
            let x0: Vec<f64> = (0..sys.n()).map(|i| 0.1 * i as f64).collect();
            for eq in sys.equations() {
                for (m, &node) in eq.nodes.iter().enumerate() {
                    // conditional mean of `node` as a function of every other node
                    let f = |x: &[f64]| {
                        let state: Vec<f64> = eq.nodes.iter().map(|&i| x[i]).collect();
                        site_conditional(&state, &parent_mean(eq, x), &eq.precision, m).0
                    };
                    let mut allowed = g.ne(node);
                    allowed.extend(g.pa(node));
                    for j in (0..sys.n()).filter(|&j| j != node) {
                        let mut x = x0.clone();
                        x[j] += 1.0;
                        let slope = f(&x) - f(&x0);
                        if !allowed.contains(&j) {
                            assert!(slope.abs() < 1e-9, "{} depends on {}", g.label(node), g.label(j));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn singleton_parts_are_drawn_directly() {
        let part = |n: &str, pa: &[&str], k: f64, b: &[f64]| GaussianPart {
            nodes: vec![n.into()],
            parents: pa.iter().map(|s| s.to_string()).collect(),
            precision: vec![vec![k]],
            coeff: vec![b.to_vec()],
            mean: vec![0.25],
        };
        let m = GaussianModel { parts: vec![part("1", &[], 4.0, &[]), part("2", &["1"], 0.5, &[0.7])], error_cov: vec![] };
        let sys = m.compile().unwrap();
        let quick = gibbs_sample(&sys, 50, 0, 5).unwrap();
        assert_eq!(quick.data, gibbs_sample(&sys, 50, 300, 5).unwrap().data);
        // the first record by hand
        let z0: f64 = stream(5, 0, 0).sample(StandardNormal);
        let x1 = 0.25 + z0 / 2.0;
        let z1: f64 = stream(5, 0, 1).sample(StandardNormal);
        let x2 = 0.25 + 0.7 * x1 + z1 / 0.5f64.sqrt();
        assert!((quick.data[(0, 0)] - x1).abs() < 1e-15);
        assert!((quick.data[(0, 1)] - x2).abs() < 1e-12);
    }

    #[test]
    fn uncoupled_targets_are_the_part_precisions() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let mut m = random_model(&mut rng, 6);
            m.error_cov.clear();
            let sys = m.compile().unwrap();
            for (t, eq) in gibbs_targets(&sys).unwrap().iter().zip(sys.equations()) {
                assert!(t.gain.is_none());
                assert_eq!(t.precision, eq.precision);
            }
        }
    }
}
