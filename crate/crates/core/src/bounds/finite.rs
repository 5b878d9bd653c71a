use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use serde::{Deserialize, Serialize};

use super::rates::entropy_unchecked;
use crate::error::{Error, Result};

/// Scalar parameters of one protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Sifted-key length.
    pub n: u64,
    /// Probability of labelling a pulse `smp`.
    pub q: f64,
    /// Slack in the pulse count.
    pub delta: f64,
    /// CHSH threshold, at most 1/√2.
    pub s0: f64,
    pub eps: f64,
    pub eps_cor: f64,
    pub f_ec: f64,
    /// Syndrome budget in bits.
    pub l_syn: u64,
}

// N and l_smp are ceilings of real expressions that are often integers in
// exact arithmetic; shave the last few ulps so 1e5·(1+ε) does not round up.
fn ceil_count(x: f64) -> u64 {
    (x * (1.0 - 1e-12)).ceil() as u64
}

impl ProtocolParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: u64,
        q: f64,
        delta: f64,
        s0: f64,
        eps: f64,
        eps_cor: f64,
        f_ec: f64,
        l_syn: u64,
    ) -> Result<Self> {
        let p = Self {
            n,
            q,
            delta,
            s0,
            eps,
            eps_cor,
            f_ec,
            l_syn,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if !(self.q > 0.0 && self.q <= 0.5) {
            return bad(format!("q = {} not in (0, 1/2]", self.q));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta = {} not in (0, 1)", self.delta));
        }
        if !(self.s0.is_finite() && self.s0 <= FRAC_1_SQRT_2 + 1e-12) {
            return bad(format!("S0 = {} exceeds 1/sqrt 2", self.s0));
        }
        for (name, e) in [("eps", self.eps), ("eps_cor", self.eps_cor)] {
            if !(e > 0.0 && e < 1.0) {
                return bad(format!("{name} = {e} not in (0, 1)"));
            }
        }
        if !(self.f_ec >= 1.0 && self.f_ec.is_finite()) {
            return bad(format!("f_ec = {} below 1", self.f_ec));
        }
        Ok(())
    }

    /// `N = ⌈n/(1−δ) · 1/(1−q)²⌉`.
    pub fn pulses(&self) -> u64 {
        ceil_count(self.n as f64 / (1.0 - self.delta) / (1.0 - self.q).powi(2))
    }

    /// `l_smp = ⌈n (q/(1−q))²⌉`.
    pub fn l_smp(&self) -> u64 {
        ceil_count(self.n as f64 * (self.q / (1.0 - self.q)).powi(2))
    }

    /// `⌈log₂(1/ε_cor)⌉`, the length of the verification hash.
    pub fn verification_bits(&self) -> usize {
        (1.0 / self.eps_cor).log2().ceil() as usize
    }
}

/// `⌈f_ec · n · h(p_est)⌉`.
pub fn conventional_syndrome_budget(n: u64, f_ec: f64, p_est: f64) -> Result<u64> {
    let h = super::binary_entropy(p_est)?;
    Ok(ceil_count(f_ec * n as f64 * h))
}

/// `δS = √((48/l_smp) ln(2/ε′))`.
pub fn delta_s(l_smp: u64, eps_prime: f64) -> f64 {
    (48.0 / l_smp as f64 * (2.0 / eps_prime).ln()).sqrt()
}

/// `μ = √((n+l)/(n l) · (l+1)/l · ln(2/ε′))`.
pub fn mu_statistical(n: u64, l_smp: u64, eps_prime: f64) -> f64 {
    let (n, l) = (n as f64, l_smp as f64);
    ((n + l) / (n * l) * (l + 1.0) / l * (2.0 / eps_prime).ln()).sqrt()
}

/// `μ′ = (4√3(1+√2) + √((n+l)(l+1)/(n l))) √(ln(6/ε)/l)`.
pub fn mu_prime(n: u64, l_smp: u64, eps: f64) -> f64 {
    let (n, l) = (n as f64, l_smp as f64);
    let lead = 4.0 * 3f64.sqrt() * (1.0 + SQRT_2);
    (lead + ((n + l) * (l + 1.0) / (n * l)).sqrt()) * ((6.0 / eps).ln() / l).sqrt()
}

/// Min-entropy lower bound on the sifted key at smoothing `ε′`.
///
/// Reported as 0 when the phase-error argument leaves [0, 1/2].
pub fn hmin_lower_bound(params: &ProtocolParams, eps_prime: f64) -> f64 {
    let l_smp = params.l_smp();
    let ds = delta_s(l_smp, eps_prime);
    let mu = mu_statistical(params.n, l_smp, eps_prime);
    let arg = (1.0 + SQRT_2) * (FRAC_1_SQRT_2 - (params.s0 - ds)) + mu;
    hmin_from_argument(params, arg)
}

fn hmin_from_argument(params: &ProtocolParams, arg: f64) -> f64 {
    if !(0.0..=0.5).contains(&arg) {
        return 0.0;
    }
    params.n as f64 * (1.0 - entropy_unchecked(arg))
        - 2.0 * params.l_smp() as f64
        - params.l_syn as f64
        - (1.0 / params.eps_cor).log2()
}

/// `d ≤ 2ε′ + 2^{−(H − l)/2}`.
pub fn leftover_bound(hmin: f64, l: u64, eps_prime: f64) -> f64 {
    2.0 * eps_prime + 2f64.powf(-0.5 * (hmin - l as f64))
}

/// Terms subtracted from (or making up) the key length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyLengthComponents {
    /// n (1 − h(argument))
    pub leading: f64,
    /// 2 l_smp
    pub sample_disclosure: f64,
    pub syndrome: f64,
    /// log₂(1/ε_cor)
    pub verification: f64,
    /// 2 log₂(3/ε)
    pub amplification: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KeyLengthReport {
    pub l: u64,
    pub pulses: u64,
    pub l_smp: u64,
    pub mu_prime: f64,
    /// δS at ε′ = ε/3.
    pub delta_s: f64,
    /// μ at ε′ = ε/3.
    pub mu: f64,
    /// (1+√2)(1/√2 − S0) + μ′.
    pub phase_error_argument: f64,
    /// Min-entropy bound at ε′ = ε/3.
    pub hmin_bound: f64,
    /// Key length before flooring and clamping; absent when the entropy
    /// argument is out of range.
    pub raw_length: Option<f64>,
    pub components: Option<KeyLengthComponents>,
    /// Why l = 0, if it is.
    pub reason: Option<String>,
}

pub fn finite_key_length(params: &ProtocolParams) -> Result<KeyLengthReport> {
    params.validate()?;
    let l_smp = params.l_smp();
    let eps_prime = params.eps / 3.0;
    let mu_p = mu_prime(params.n, l_smp, params.eps);
    let arg = (1.0 + SQRT_2) * (FRAC_1_SQRT_2 - params.s0) + mu_p;
    let mut report = KeyLengthReport {
        l: 0,
        pulses: params.pulses(),
        l_smp,
        mu_prime: mu_p,
        delta_s: delta_s(l_smp, eps_prime),
        mu: mu_statistical(params.n, l_smp, eps_prime),
        phase_error_argument: arg,
        hmin_bound: hmin_from_argument(params, arg),
        raw_length: None,
        components: None,
        reason: None,
    };
    if !(0.0..=0.5).contains(&arg) {
        report.reason = Some(format!("phase-error argument {arg:.6} outside [0, 1/2]"));
        return Ok(report);
    }
    let c = KeyLengthComponents {
        leading: params.n as f64 * (1.0 - entropy_unchecked(arg)),
        sample_disclosure: 2.0 * l_smp as f64,
        syndrome: params.l_syn as f64,
        verification: (1.0 / params.eps_cor).log2(),
        amplification: 2.0 * (3.0 / params.eps).log2(),
    };
    let raw = c.leading - c.sample_disclosure - c.syndrome - c.verification - c.amplification;
    report.raw_length = Some(raw);
    report.components = Some(c);
    if raw < 1.0 {
        report.reason = Some(format!("deductions exceed the leading term (raw {raw:.3})"));
    } else {
        report.l = raw.floor() as u64;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChernoffReport {
    /// 2 exp(−(δq)²/2), with no dependence on N.
    pub size_free_bound: f64,
    /// Multiplicative Chernoff lower-tail bound on either pair count
    /// falling short, union-bounded.
    pub corrected_bound: f64,
    pub expected_sample_pairs: f64,
    pub expected_sifted_pairs: f64,
}

/// Bounds on Pr[fewer than l_smp both-smp or n both-sif pairs among N].
pub fn chernoff_abort_bound(params: &ProtocolParams) -> ChernoffReport {
    let big_n = params.pulses() as f64;
    let q = params.q;
    let e_s = big_n * q * q;
    let e_f = big_n * (1.0 - q) * (1.0 - q);
    let tail = |required: f64, mean: f64| {
        let d = 1.0 - required / mean;
        if d <= 0.0 {
            1.0
        } else {
            (-d * d * mean / 2.0).exp()
        }
    };
    let corrected = tail(params.l_smp() as f64, e_s) + tail(params.n as f64, e_f);
    ChernoffReport {
        size_free_bound: 2.0 * (-(params.delta * q).powi(2) / 2.0).exp(),
        corrected_bound: corrected.min(1.0),
        expected_sample_pairs: e_s,
        expected_sifted_pairs: e_f,
    }
}

/// `exp(−l_smp δS²/48)`.
pub fn azuma_tail(l_smp: u64, delta_s: f64) -> f64 {
    (-(l_smp as f64) * delta_s * delta_s / 48.0).exp()
}
