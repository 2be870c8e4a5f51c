//! Closed-form joint laws and the exact conditional-independence oracle.

use nalgebra::{DMatrix, DVector};

use super::system::EquilibriumSystem;
use crate::error::{Error, Result};
use crate::label::do_label;

/// Threshold on the absolute partial correlation below which an exact
/// conditional independence is declared.
pub const EXACT_CI_TOL: f64 = 1e-8;

/// A Gaussian law over labelled coordinates.
#[derive(Debug, Clone)]
pub struct GaussianLaw {
    pub labels: Vec<String>,
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianLaw {
    pub fn id(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    /// Coordinates with zero variance, i.e. intervened constants.
    pub fn is_degenerate(&self, i: usize) -> bool {
        self.cov[(i, i)] <= 1e-14
    }

    pub fn marginal(&self, labels: &[String]) -> Result<GaussianLaw> {
        let ids: Vec<usize> = labels.iter().map(|l| self.id(l)).collect::<Result<_>>()?;
        Ok(GaussianLaw {
            labels: labels.to_vec(),
            mean: DVector::from_iterator(ids.len(), ids.iter().map(|&i| self.mean[i])),
            cov: DMatrix::from_fn(ids.len(), ids.len(), |a, b| self.cov[(ids[a], ids[b])]),
        })
    }
}

pub fn joint_law(sys: &EquilibriumSystem) -> GaussianLaw {
    let (offset, loading) = sys.affine();
    let cov = &loading * &sys.error_cov * loading.transpose();
    GaussianLaw { labels: sys.labels().to_vec(), mean: offset, cov }
}

/// Joint law of the observational nodes and their copies under the
/// intervention, both worlds driven by the same errors. Copies are labelled
/// `i^do(C)`, including those that coincide with `i`.
pub fn coupled_law(sys: &EquilibriumSystem, values: &[(usize, f64)]) -> Result<GaussianLaw> {
    let treated = sys.intervene(values)?;
    let (o1, l1) = sys.affine();
    let (o2, l2) = treated.affine();
    let n = sys.n();
    let mut offset = DVector::zeros(2 * n);
    offset.rows_mut(0, n).copy_from(&o1);
    offset.rows_mut(n, n).copy_from(&o2);
    let mut loading = DMatrix::zeros(2 * n, l1.ncols());
    loading.rows_mut(0, n).copy_from(&l1);
    loading.rows_mut(n, n).copy_from(&l2);
    let cov = &loading * &sys.error_cov * loading.transpose();
    let names: Vec<String> = values.iter().map(|&(c, _)| sys.labels()[c].clone()).collect();
    let mut labels = sys.labels().to_vec();
    labels.extend(sys.labels().iter().map(|l| do_label(l, &names)));
    Ok(GaussianLaw { labels, mean: offset, cov })
}

/// Conditional variance ratios below this make a partial correlation
/// unresolvable at the exact-CI tolerance.
const DEGENERATE_RATIO: f64 = 1e-8;

/// Partial correlation of coordinates `i` and `j` given `s`.
pub fn partial_correlation(cov: &DMatrix<f64>, i: usize, j: usize, s: &[usize]) -> Result<f64> {
    let mut idx = vec![i, j];
    idx.extend_from_slice(s);
    let d: Vec<f64> = idx.iter().map(|&a| cov[(a, a)]).collect();
    if d.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
        return Err(Error::SingularCovariance);
    }
    // work on the correlation scale so the thresholds are scale free
    let corr = |a: usize, b: usize| cov[(idx[a], idx[b])] / (d[a] * d[b]).sqrt();
    let k = s.len();
    let mut cond = DMatrix::from_fn(2, 2, |a, b| corr(a, b));
    if k > 0 {
        let css = DMatrix::from_fn(k, k, |a, b| corr(a + 2, b + 2));
        let chol = css.cholesky().ok_or(Error::SingularCovariance)?;
        if chol.l().diagonal().iter().any(|&x| x * x < DEGENERATE_RATIO) {
            return Err(Error::SingularCovariance);
        }
        let cross = DMatrix::from_fn(k, 2, |a, b| corr(a + 2, b));
        let y = chol.l().solve_lower_triangular(&cross).ok_or(Error::SingularCovariance)?;
        cond -= y.transpose() * y;
    }
    if cond[(0, 0)] < DEGENERATE_RATIO || cond[(1, 1)] < DEGENERATE_RATIO {
        return Err(Error::SingularCovariance);
    }
    Ok((cond[(0, 1)] / (cond[(0, 0)] * cond[(1, 1)]).sqrt()).clamp(-1.0, 1.0))
}

/// Whether `i` and `j` are conditionally independent given `s` under a
/// Gaussian with covariance `cov`.
pub fn exact_ci(cov: &DMatrix<f64>, i: usize, j: usize, s: &[usize]) -> Result<bool> {
    Ok(partial_correlation(cov, i, j, s)?.abs() < EXACT_CI_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::model::GaussianModel;

    fn chain() -> EquilibriumSystem {
        GaussianModel::from_json(
            r#"{"parts":[{"nodes":["1"],"precision":[[1.0]]},
                {"nodes":["2"],"parents":["1"],"precision":[[1.0]],"coeff":[[1.0]]}]}"#,
        )
        .unwrap()
        .compile()
        .unwrap()
    }

    #[test]
    fn single_part_law_is_its_equilibrium() {
        let m = GaussianModel::from_json(r#"{"parts":[{"nodes":["a","b"],"precision":[[2.0,0.5],[0.5,1.0]],"mean":[1.0,-1.0]}]}"#).unwrap();
        let law = joint_law(&m.compile().unwrap());
        let k = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        assert!((&law.cov - k.try_inverse().unwrap()).amax() < 1e-12);
        assert_eq!(law.mean.as_slice(), [1.0, -1.0]);
    }

    #[test]
    fn chain_variances_add() {
        let law = joint_law(&chain());
        assert!((law.cov[(1, 1)] - 2.0).abs() < 1e-12);
        assert!((law.cov[(0, 1)] - 1.0).abs() < 1e-12);
        assert!(!exact_ci(&law.cov, 0, 1, &[]).unwrap());
    }

    #[test]
    fn independent_coordinates() {
        let cov = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.3, 0.0, 2.0, 0.0, 0.3, 0.0, 1.0]);
        assert!(exact_ci(&cov, 0, 1, &[]).unwrap());
        assert!(exact_ci(&cov, 0, 1, &[2]).unwrap());
        assert!(!exact_ci(&cov, 0, 2, &[1]).unwrap());
    }

    #[test]
    fn constants_are_singular() {
        let law = coupled_law(&chain(), &[(0, 1.0)]).unwrap();
        assert_eq!(law.labels, ["1", "2", "1^do(1)", "2^do(1)"]);
        assert!(law.is_degenerate(2));
        assert_eq!(partial_correlation(&law.cov, 1, 3, &[2]), Err(Error::SingularCovariance));
        // X2 and X2^do(1) share the error of 2 only
        assert!((law.cov[(1, 3)] - 1.0).abs() < 1e-12);
    }
}
