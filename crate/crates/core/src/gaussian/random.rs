//! Random valid models and the three shipped simulation models.

use rand::seq::SliceRandom;
use rand::Rng;

use super::model::{min_eigenvalue, ErrorCovBlock, GaussianModel, GaussianPart};
use crate::error::Error;

fn coefficient(rng: &mut impl Rng) -> f64 {
    let x: f64 = rng.random_range(0.3..1.0);
    if rng.random_bool(0.5) {
        x
    } else {
        -x
    }
}

/// A random diagonally dominant precision with a random sparsity pattern.
fn random_precision(rng: &mut impl Rng, k: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            if rng.random_bool(0.7) {
                let v = coefficient(rng) * 0.5;
                m[i][j] = v;
                m[j][i] = v;
            }
        }
    }
    for i in 0..k {
        let off: f64 = m[i].iter().map(|x| x.abs()).sum();
        m[i][i] = off + rng.random_range(0.5..1.5);
    }
    m
}

/// Random model on nodes `1..=n`: parts of one to three nodes in a random
/// order, parents drawn from earlier parts, some parent effects cancelled
/// exactly, and error couplings between random pairs of parts. Redrawn
/// until its graph is anterial.
pub fn random_model(rng: &mut impl Rng, n: usize) -> GaussianModel {
    loop {
        let m = draw_model(rng, n);
        match m.compile().and_then(|s| s.corresponding_graph()) {
            Ok(_) => return m,
            Err(Error::NonAnterialResult) => continue,
            Err(e) => panic!("random model is invalid: {e}"),
        }
    }
}

fn draw_model(rng: &mut impl Rng, n: usize) -> GaussianModel {
    let mut labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    labels.shuffle(rng);
    let mut parts = Vec::new();
    let mut rest = &labels[..];
    let mut earlier: Vec<String> = Vec::new();
    while !rest.is_empty() {
        let k = rng.random_range(1..=3.min(rest.len()));
        let nodes = rest[..k].to_vec();
        rest = &rest[k..];
        let parents: Vec<String> = earlier.iter().filter(|_| rng.random_bool(0.4)).cloned().collect();
        let precision = random_precision(rng, k);
        let mut coeff: Vec<Vec<f64>> =
            (0..k).map(|_| parents.iter().map(|_| if rng.random_bool(0.8) { coefficient(rng) } else { 0.0 }).collect()).collect();
        // cancel one parent's effect on one node exactly
        if k > 1 && !parents.is_empty() && rng.random_bool(0.4) {
            let i = rng.random_range(0..k);
            let c = rng.random_range(0..parents.len());
            let s: f64 = (0..k).filter(|&j| j != i).map(|j| precision[i][j] * coeff[j][c]).sum();
            coeff[i][c] = -s / precision[i][i];
        }
        let mean = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        earlier.extend(nodes.iter().cloned());
        parts.push(GaussianPart { nodes, parents, precision, coeff, mean });
    }
    let mut error_cov = Vec::new();
    for a in 0..parts.len() {
        for b in a + 1..parts.len() {
            if rng.random_bool(0.25) {
                let block = (0..parts[a].nodes.len())
                    .map(|_| (0..parts[b].nodes.len()).map(|_| coefficient(rng) * 0.5).collect())
                    .collect();
                error_cov.push(ErrorCovBlock { a, b, block });
            }
        }
    }
    let mut m = GaussianModel { parts, error_cov };
    // shrink the couplings until the error covariance is positive definite
    loop {
        let r = m.error_covariance().expect("shapes are consistent");
        if min_eigenvalue(&r) > 0.05 {
            return m;
        }
        for blk in &mut m.error_cov {
            blk.block.iter_mut().flatten().for_each(|x| *x *= 0.5);
        }
    }
}

pub const G1_JSON: &str = include_str!("../../models/g1.json");
pub const G2_JSON: &str = include_str!("../../models/g2.json");
pub const G3_JSON: &str = include_str!("../../models/g3.json");

/// The shipped simulation models, by name.
pub fn shipped_models() -> Vec<(&'static str, GaussianModel)> {
    [("g1", G1_JSON), ("g2", G2_JSON), ("g3", G3_JSON)]
        .into_iter()
        .map(|(name, text)| (name, GaussianModel::from_json(text).expect("shipped model is valid")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::is_chain_connected_anterial;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_models_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=8 {
            let m = random_model(&mut rng, n);
            assert_eq!(m.labels().len(), n);
            let g = m.compile().unwrap().corresponding_graph().unwrap();
            assert!(is_chain_connected_anterial(&g));
        }
    }

    #[test]
    fn shipped_model_graphs() {
        let graphs: Vec<_> = shipped_models().into_iter().map(|(_, m)| m.compile().unwrap().corresponding_graph().unwrap()).collect();
        let edges = |i: usize| {
            let mut v: Vec<String> = graphs[i].labelled_edges().into_iter().map(|(a, b, k)| format!("{a}{}{b}", k.symbol())).collect();
            v.sort();
            v
        };
        assert_eq!(edges(0), ["1-->2", "1<->4", "2---3", "2-->5", "4-->5", "5---6"]);
        assert_eq!(edges(1), ["1-->3", "1<->2", "2-->4", "3---4"]);
        assert_eq!(edges(2), ["1-->3", "1<->2", "2-->5", "3---4", "4---5"]);
    }
}
