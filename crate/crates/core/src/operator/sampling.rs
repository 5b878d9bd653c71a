use rand::Rng;

use super::{min_eigenvalue, HermitianOperator, Matrix, StateDensity, POST_TOL};
use crate::error::{Error, Result};

/// Outcome probabilities Tr[Pₖρ] for a POVM `projectors`.
///
/// Entries in [−1e-10, 0) are clipped to zero and the vector renormalized;
/// anything more negative is reported as an invalid POVM.
pub fn born_probabilities(
    rho: &StateDensity,
    projectors: &[HermitianOperator],
) -> Result<Vec<f64>> {
    if projectors.is_empty() {
        return Err(Error::NotPovm("empty outcome set".into()));
    }
    let dim = rho.dim();
    let mut sum = Matrix::zeros(dim, dim);
    for (k, p) in projectors.iter().enumerate() {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        let min = min_eigenvalue(p);
        if min < -POST_TOL {
            return Err(Error::NotPovm(format!(
                "element {k} has eigenvalue {min:.3e}"
            )));
        }
        sum = &sum + p.matrix();
    }
    let defect = sum.max_abs_diff(&Matrix::identity(dim));
    if defect > POST_TOL {
        return Err(Error::NotPovm(format!(
            "elements sum to I within {defect:.3e}"
        )));
    }

    let mut probs: Vec<f64> = projectors.iter().map(|p| p.expectation(rho)).collect();
    for (k, pr) in probs.iter_mut().enumerate() {
        if *pr < -POST_TOL {
            return Err(Error::NotPovm(format!(
                "outcome {k} has probability {pr:.3e}"
            )));
        }
        *pr = pr.max(0.0);
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(probs)
}

/// Draws an outcome index with probability Tr[Pₖρ].
pub fn born_sample<R: Rng + ?Sized>(
    rho: &StateDensity,
    projectors: &[HermitianOperator],
    rng: &mut R,
) -> Result<usize> {
    let probs = born_probabilities(rho, projectors)?;
    Ok(sample_index(&probs, rng))
}

/// Inverse-CDF draw from a normalized probability vector.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // rounding left acc slightly below 1; fall back to the last nonzero cell
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}
