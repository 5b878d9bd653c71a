use rand::Rng;
use serde::Serialize;

use crate::bounds::azuma_tail;
use crate::chsh::ChshMeasurement;
use crate::error::{Error, Result};
use crate::operator::{born_probabilities, sample_index, StateDensity};

/// Comparison of the ±1-valued estimator with the one that outputs the
/// Bell eigenvalue directly, over repeated batches of `l_smp` samples.
#[derive(Debug, Clone, Serialize)]
pub struct NoiseReport {
    pub l_smp: u64,
    pub trials: usize,
    pub delta_s: f64,
    /// Mean over trials of the ±1 average.
    pub mean_s_sign: f64,
    /// Mean over trials of the eigenvalue average.
    pub mean_s_eigen: f64,
    pub max_abs_difference: f64,
    pub exceedances: usize,
    pub empirical_tail: f64,
    pub azuma_bound: f64,
    pub within_bound: bool,
}

/// Bell measurement of `rho` in the eigenbasis of `m`, followed either by
/// a ±1 coin with mean equal to the eigenvalue or by the eigenvalue itself.
pub fn povm_noise_experiment<R: Rng + ?Sized>(
    m: &ChshMeasurement,
    rho: &StateDensity,
    l_smp: u64,
    trials: usize,
    delta_s: f64,
    rng: &mut R,
) -> Result<NoiseReport> {
    let projectors: Vec<_> = m.bell_basis.iter().map(|b| b.projector()).collect();
    let probs = born_probabilities(rho, &projectors)?;
    let eig: Vec<f64> = m.bell_basis.iter().map(|b| b.eigenvalue).collect();
    noise_experiment_from_weights(&eig, &probs, l_smp, trials, delta_s, rng)
}

/// Same experiment for an arbitrary outcome distribution over eigenvalues
/// in [−1, 1].
pub fn noise_experiment_from_weights<R: Rng + ?Sized>(
    eigenvalues: &[f64],
    probs: &[f64],
    l_smp: u64,
    trials: usize,
    delta_s: f64,
    rng: &mut R,
) -> Result<NoiseReport> {
    if eigenvalues.len() != probs.len() || eigenvalues.is_empty() {
        return Err(Error::LengthMismatch {
            expected: eigenvalues.len(),
            found: probs.len(),
        });
    }
    if eigenvalues.iter().any(|e| !(-1.0..=1.0).contains(e)) {
        return Err(Error::InvalidParams(
            "eigenvalues must lie in [-1, 1]".into(),
        ));
    }
    if trials == 0 || l_smp == 0 || !(delta_s > 0.0) {
        return Err(Error::InvalidParams(
            "need trials, l_smp >= 1 and delta_s > 0".into(),
        ));
    }
    let (mut sum_sign, mut sum_eigen, mut worst) = (0.0, 0.0, 0.0f64);
    let mut exceedances = 0;
    for _ in 0..trials {
        let (mut s_sign, mut s_eigen) = (0i64, 0.0);
        for _ in 0..l_smp {
            let lambda = eigenvalues[sample_index(probs, rng)];
            s_eigen += lambda;
            // +1 with probability (1 + λ)/2
            s_sign += if rng.random::<f64>() < 0.5 * (1.0 + lambda) {
                1
            } else {
                -1
            };
        }
        let (a, b) = (s_sign as f64 / l_smp as f64, s_eigen / l_smp as f64);
        sum_sign += a;
        sum_eigen += b;
        let d = (a - b).abs();
        worst = worst.max(d);
        if d >= delta_s {
            exceedances += 1;
        }
    }
    let empirical_tail = exceedances as f64 / trials as f64;
    let azuma_bound = azuma_tail(l_smp, delta_s);
    Ok(NoiseReport {
        l_smp,
        trials,
        delta_s,
        mean_s_sign: sum_sign / trials as f64,
        mean_s_eigen: sum_eigen / trials as f64,
        max_abs_difference: worst,
        exceedances,
        empirical_tail,
        azuma_bound,
        within_bound: empirical_tail <= azuma_bound,
    })
}
