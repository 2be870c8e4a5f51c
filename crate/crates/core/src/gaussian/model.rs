//! The JSON model format and its validation.

use std::collections::{HashMap, HashSet};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One functional assignment: `X_τ | x_pa ~ N(mean + coeff · x_pa, precision⁻¹)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPart {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub parents: Vec<String>,
    pub precision: Vec<Vec<f64>>,
    #[serde(default)]
    pub coeff: Vec<Vec<f64>>,
    #[serde(default)]
    pub mean: Vec<f64>,
}

/// `Cov(ε_a, ε_b)` for parts `a` and `b` (indices into `parts`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCovBlock {
    pub a: usize,
    pub b: usize,
    pub block: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianModel {
    pub parts: Vec<GaussianPart>,
    #[serde(default)]
    pub error_cov: Vec<ErrorCovBlock>,
}

pub(crate) fn matrix(rows: &[Vec<f64>], nrows: usize, ncols: usize, what: &str) -> Result<DMatrix<f64>> {
    if ncols == 0 && rows.iter().all(|r| r.is_empty()) && (rows.is_empty() || rows.len() == nrows) {
        return Ok(DMatrix::zeros(nrows, 0));
    }
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::InvalidModel(format!("{what} must be {nrows}x{ncols}")));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidModel(format!("{what} has non-finite entries")));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    m.clone().symmetric_eigen().eigenvalues.min()
}

impl GaussianPart {
    pub(crate) fn precision_matrix(&self) -> Result<DMatrix<f64>> {
        let k = self.nodes.len();
        let m = matrix(&self.precision, k, k, "precision")?;
        let scale = m.amax().max(1.0);
        if (&m - m.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidModel(format!("precision of part {:?} is not symmetric", self.nodes)));
        }
        if min_eigenvalue(&m) <= 1e-10 {
            return Err(Error::InvalidModel(format!("precision of part {:?} is not positive definite", self.nodes)));
        }
        Ok(m)
    }

    pub(crate) fn coeff_matrix(&self) -> Result<DMatrix<f64>> {
        matrix(&self.coeff, self.nodes.len(), self.parents.len(), "coeff")
    }

    pub(crate) fn mean_vector(&self) -> Result<DVector<f64>> {
        if self.mean.is_empty() {
            return Ok(DVector::zeros(self.nodes.len()));
        }
        if self.mean.len() != self.nodes.len() || self.mean.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidModel(format!("mean of part {:?} must have {} finite entries", self.nodes, self.nodes.len())));
        }
        Ok(DVector::from_column_slice(&self.mean))
    }
}

impl GaussianModel {
    pub fn from_json(text: &str) -> Result<Self> {
        let m: GaussianModel = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialises")
    }

    /// Node labels in part order.
    pub fn labels(&self) -> Vec<String> {
        self.parts.iter().flat_map(|p| p.nodes.iter().cloned()).collect()
    }

    /// Shapes, symmetry and definiteness of every block, parents drawn from
    /// earlier parts, and a positive semi-definite error covariance.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for (idx, part) in self.parts.iter().enumerate() {
            if part.nodes.is_empty() {
                return Err(Error::InvalidModel(format!("part {idx} has no nodes")));
            }
            for p in &part.parents {
                if !seen.contains(p.as_str()) {
                    return Err(Error::InvalidModel(format!("parent `{p}` of part {idx} is not in an earlier part")));
                }
            }
            if part.parents.iter().collect::<HashSet<_>>().len() != part.parents.len() {
                return Err(Error::InvalidModel(format!("part {idx} lists a parent twice")));
            }
            for v in &part.nodes {
                if !seen.insert(v.as_str()) {
                    return Err(Error::DuplicateLabel(v.clone()));
                }
            }
            part.precision_matrix()?;
            part.coeff_matrix()?;
            part.mean_vector()?;
        }
        let r = self.error_covariance()?;
        if min_eigenvalue(&r) < -1e-10 {
            return Err(Error::InvalidModel("error covariance is not positive semi-definite".into()));
        }
        Ok(())
    }

    /// Offsets of each part's error block in the stacked error vector.
    pub(crate) fn error_offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.parts.len() + 1);
        let mut acc = 0;
        off.push(0);
        for p in &self.parts {
            acc += p.nodes.len();
            off.push(acc);
        }
        off
    }

    /// The stacked error covariance: identity blocks on the diagonal.
    pub(crate) fn error_covariance(&self) -> Result<DMatrix<f64>> {
        let off = self.error_offsets();
        let dim = off[self.parts.len()];
        let mut r = DMatrix::identity(dim, dim);
        let mut pairs = HashMap::new();
        for blk in &self.error_cov {
            let (a, b) = (blk.a, blk.b);
            if a >= self.parts.len() || b >= self.parts.len() || a == b {
                return Err(Error::InvalidModel(format!("error_cov block ({a}, {b}) does not name two distinct parts")));
            }
            if pairs.insert((a.min(b), a.max(b)), ()).is_some() {
                return Err(Error::InvalidModel(format!("error_cov block ({a}, {b}) given twice")));
            }
            let m = matrix(&blk.block, self.parts[a].nodes.len(), self.parts[b].nodes.len(), "error_cov block")?;
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    r[(off[a] + i, off[b] + j)] = m[(i, j)];
                    r[(off[b] + j, off[a] + i)] = m[(i, j)];
                }
            }
        }
        Ok(r)
    }
}
