//! Fisher-Z conditional-independence tests and pairwise Markov reports.

use nalgebra::DMatrix;
use serde::Serialize;
use statrs::function::erf::erfc;

use super::law::{partial_correlation, GaussianLaw, EXACT_CI_TOL};
use super::sample::SampleMatrix;
use crate::error::{Error, Result};
use crate::graph::{mask_ids, MixedGraph};
use crate::separation::separated;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherZ {
    pub r: f64,
    pub z: f64,
    pub p_value: f64,
}

/// Two-sided p-value of `z` under the standard normal.
pub fn normal_two_sided(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2)
}

/// Statistic and p-value for a sample partial correlation `r` from `n`
/// records with `k` conditioning variables.
pub fn fisher_z_from_r(r: f64, n: usize, k: usize) -> Result<FisherZ> {
    if n <= k + 3 {
        return Err(Error::TooFewSamples { n, k });
    }
    let r = r.clamp(-1.0 + 1e-15, 1.0 - 1e-15);
    let z = r.atanh() * ((n - k - 3) as f64).sqrt();
    Ok(FisherZ { r, z, p_value: normal_two_sided(z) })
}

fn sample_covariance(data: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    let n = data.nrows() as f64;
    let means: Vec<f64> = cols.iter().map(|&c| data.column(c).sum() / n).collect();
    DMatrix::from_fn(cols.len(), cols.len(), |a, b| {
        let (ca, cb) = (data.column(cols[a]), data.column(cols[b]));
        ca.iter().zip(cb.iter()).map(|(x, y)| (x - means[a]) * (y - means[b])).sum::<f64>() / (n - 1.0)
    })
}

/// Fisher-Z test of `i ⊥ j | s` on sample columns.
pub fn fisher_z(samples: &SampleMatrix, i: usize, j: usize, s: &[usize]) -> Result<FisherZ> {
    let n = samples.n();
    if n <= s.len() + 3 {
        return Err(Error::TooFewSamples { n, k: s.len() });
    }
    let mut cols = vec![i, j];
    cols.extend_from_slice(s);
    if let Some(&c) = cols.iter().find(|&&c| samples.data.column(c).iter().all(|&x| x == samples.data[(0, c)])) {
        return Err(Error::ConstantColumn(samples.labels[c].clone()));
    }
    let cov = sample_covariance(&samples.data, &cols);
    let idx: Vec<usize> = (2..cols.len()).collect();
    let r = partial_correlation(&cov, 0, 1, &idx)?;
    fisher_z_from_r(r, n, s.len())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovRow {
    pub a: String,
    pub b: String,
    /// `ant({a, b}) \ {a, b}` in the graph.
    pub given: Vec<String>,
    /// Whether the graph separates `a` and `b` given `given`.
    pub implied: bool,
    pub partial_correlation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    /// Exact mode: whether the independence holds in the law.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub independent: Option<bool>,
}

pub enum MarkovData<'a> {
    Samples(&'a SampleMatrix),
    Law(&'a GaussianLaw),
}

/// One row per unordered pair in label order, testing `a ⊥ b | ant(a, b)`.
pub fn markov_report(g: &MixedGraph, data: MarkovData<'_>) -> Result<Vec<MarkovRow>> {
    let labels = match &data {
        MarkovData::Samples(s) => &s.labels,
        MarkovData::Law(l) => &l.labels,
    };
    let col = |v: usize| -> Result<usize> {
        let name = g.label(v);
        labels.iter().position(|l| l == name).ok_or_else(|| Error::LabelMismatch(name.to_string()))
    };
    let ids = g.ordered_ids();
    let cols: Vec<usize> = (0..g.n()).map(col).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (x, &a) in ids.iter().enumerate() {
        for &b in &ids[x + 1..] {
            let mut ant = g.ant_mask(&[a, b]);
            ant[a] = false;
            ant[b] = false;
            let mut given = mask_ids(&ant);
            g.sort_ids(&mut given);
            let implied = separated(g, &[a], &[b], &given)?;
            let s: Vec<usize> = given.iter().map(|&v| cols[v]).collect();
            let (pc, p_value, independent) = match &data {
                MarkovData::Samples(sm) => {
                    let t = fisher_z(sm, cols[a], cols[b], &s)?;
                    (t.r, Some(t.p_value), None)
                }
                MarkovData::Law(law) => {
                    let r = partial_correlation(&law.cov, cols[a], cols[b], &s)?;
                    (r, None, Some(r.abs() < EXACT_CI_TOL))
                }
            };
            rows.push(MarkovRow {
                a: g.label(a).to_string(),
                b: g.label(b).to_string(),
                given: g.labels_of(&given),
                implied,
                partial_correlation: pc,
                p_value,
                independent,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::sample::Provenance;

    #[test]
    fn zero_correlation_has_unit_p() {
        let t = fisher_z_from_r(0.0, 50, 2).unwrap();
        assert_eq!(t.z, 0.0);
        assert_eq!(t.p_value, 1.0);
    }

    #[test]
    fn half_correlation_at_103_records() {
        let t = fisher_z_from_r(0.5, 103, 0).unwrap();
        // atanh(0.5) = ln(3) / 2
        assert!((t.z - 3f64.ln() / 2.0 * 10.0).abs() < 1e-12);
        assert!((t.z - 5.493).abs() < 1e-3);
        // upper tail from the continued fraction of the normal Mills ratio
        let z = t.z;
        let mut cf = 0.0;
        for k in (1..200).rev() {
            cf = k as f64 / (z + cf);
        }
        let tail = (-z * z / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt() / (z + cf);
        assert!((t.p_value - 2.0 * tail).abs() / t.p_value < 1e-9);
        assert!((t.p_value - 3.95e-8).abs() < 0.01e-8);
    }

    #[test]
    fn guards() {
        assert_eq!(fisher_z_from_r(0.1, 5, 2), Err(Error::TooFewSamples { n: 5, k: 2 }));
        let data = DMatrix::from_row_slice(6, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 0.5, 1.0, 0.1, 1.0, 0.3]);
        let s = SampleMatrix { labels: vec!["1".into(), "2".into()], data, provenance: Provenance::Equilibrium };
        assert_eq!(fisher_z(&s, 0, 1, &[]), Err(Error::ConstantColumn("1".into())));
    }
}
