use std::f64::consts::SQRT_2;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::strategy::{EveStrategy, PulseSource};
use super::transcript::{AbortReason, Label, PulseRecord, Transcript, TRANSCRIPT_SCHEMA};
use crate::bounds::{conventional_syndrome_budget, finite_key_length, ProtocolParams};
use crate::chsh::{chsh_sign, Basis};
use crate::error::{Error, Result};
use crate::hashing::{BitString, ToeplitzHash};
use crate::operator::{sample_index, tensor, HermitianOperator, StateDensity};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SimOptions {
    /// QBER estimate used to size the syndrome; defaults to
    /// `(1 − √2·S_est)/2` clamped to [0, 1/2].
    pub p_est: Option<f64>,
    /// Overrides the secret-key length from the finite-size bound.
    pub key_length: Option<u64>,
    /// Flip a random nonzero pattern of Bob's corrected key before
    /// verification.
    pub corrupt_corrected_key: bool,
}

/// Outcome probabilities of `A ⊗ B` on `rho`, ordered (+,+), (+,−), (−,+), (−,−).
pub fn joint_probabilities(
    rho: &StateDensity,
    a: &HermitianOperator,
    b: &HermitianOperator,
) -> Result<[f64; 4]> {
    let id = HermitianOperator::identity(2);
    let ea = tensor(a, &id)?.expectation(rho);
    let eb = tensor(&id, b)?.expectation(rho);
    let eab = tensor(a, b)?.expectation(rho);
    let mut out = [0.0; 4];
    for (k, (ra, rb)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .into_iter()
        .enumerate()
    {
        let p = 0.25 * (1.0 + ra * ea + rb * eb + ra * rb * eab);
        if p < -1e-10 {
            return Err(Error::InvalidState(format!(
                "negative outcome probability {p:.3e}"
            )));
        }
        out[k] = p.max(0.0);
    }
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= total);
    Ok(out)
}

/// Joint outcome tables for Alice's [z, x] against Bob's [z, x, z′].
struct PulseTable([[[f64; 4]; 3]; 2]);

impl PulseTable {
    fn new(src: &PulseSource) -> Result<Self> {
        let alice = src.frame.alice_observables();
        let bob = src.frame.bob_observables();
        let mut t = [[[0.0; 4]; 3]; 2];
        for (i, a) in alice.iter().enumerate() {
            for (j, b) in bob.iter().enumerate() {
                t[i][j] = joint_probabilities(&src.state, a, b)?;
            }
        }
        Ok(Self(t))
    }

    fn simulate<R: Rng>(&self, q: f64, rng: &mut R) -> PulseRecord {
        let mut label = || {
            if rng.random::<f64>() < q {
                Label::Smp
            } else {
                Label::Sif
            }
        };
        let (label_a, label_b) = (label(), label());
        let mut basis = |l: Label| match l {
            Label::Sif => Basis::Z,
            Label::Smp if rng.random::<bool>() => Basis::X,
            Label::Smp => Basis::Z,
        };
        let (basis_a, basis_b) = (basis(label_a), basis(label_b));
        let ia = usize::from(basis_a == Basis::X);
        let ib = match (label_b, basis_b) {
            (Label::Sif, _) => 2,
            (Label::Smp, Basis::Z) => 0,
            (Label::Smp, Basis::X) => 1,
        };
        let k = sample_index(&self.0[ia][ib], rng);
        PulseRecord {
            label_a,
            label_b,
            basis_a,
            basis_b,
            r_a: if k < 2 { 1 } else { -1 },
            r_b: if k.is_multiple_of(2) { 1 } else { -1 },
        }
    }
}

fn pulse_rng(base: &ChaCha8Rng, key: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(key);
    rng.set_word_pos(0);
    rng
}

/// Labels, bases and outcomes for each `(source, key)`. The randomness of a
/// pulse comes from its own stream selected by `key`, so a pulse's record
/// depends on nothing but its source, its key and `seed`.
pub fn measure_pulses(
    sources: &[(PulseSource, u64)],
    q: f64,
    seed: u64,
) -> Result<Vec<PulseRecord>> {
    let base = ChaCha8Rng::seed_from_u64(seed);
    sources
        .iter()
        .map(|(src, key)| Ok(PulseTable::new(src)?.simulate(q, &mut pulse_rng(&base, *key))))
        .collect()
}

pub fn run_protocol(params: &ProtocolParams, eve: &EveStrategy, seed: u64) -> Result<Transcript> {
    run_protocol_with(params, eve, seed, &SimOptions::default())
}

pub fn run_protocol_with(
    params: &ProtocolParams,
    eve: &EveStrategy,
    seed: u64,
    opts: &SimOptions,
) -> Result<Transcript> {
    params.validate()?;
    let n_pulses = params.pulses() as usize;
    let base = ChaCha8Rng::seed_from_u64(seed);

    let pulses: Vec<PulseRecord> = match (eve.iid_source()?, eve) {
        (Some(src), _) => {
            let table = PulseTable::new(&src)?;
            (0..n_pulses)
                .map(|i| table.simulate(params.q, &mut pulse_rng(&base, i as u64)))
                .collect()
        }
        (None, EveStrategy::Custom(list)) => {
            if list.len() < n_pulses {
                return Err(Error::StrategyTooShort {
                    supplied: list.len(),
                    needed: n_pulses,
                });
            }
            let keyed: Vec<(PulseSource, u64)> =
                list[..n_pulses].iter().cloned().zip(0..).collect();
            measure_pulses(&keyed, params.q, seed)?
        }
        (None, _) => unreachable!("only custom strategies lack a shared source"),
    };

    let mut rng = pulse_rng(&base, u64::MAX);
    let mut t = Transcript {
        schema: TRANSCRIPT_SCHEMA,
        seed,
        strategy: eve.to_string(),
        params: *params,
        pulses,
        i_smp: Vec::new(),
        i_sif: Vec::new(),
        s_est: None,
        abort: None,
        sifted_key: None,
        bob_raw_key: None,
        corrected_key: None,
        p_est: None,
        syndrome_bits: None,
        syndrome_within_budget: None,
        f_cor: None,
        f_pa: None,
        key_length: 0,
        key_a: None,
        key_b: None,
    };

    // sample and sift selection
    let both = |l: Label| -> Vec<usize> {
        t.pulses
            .iter()
            .enumerate()
            .filter(|(_, r)| r.label_a == l && r.label_b == l)
            .map(|(i, _)| i)
            .collect()
    };
    let (smp, sif) = (both(Label::Smp), both(Label::Sif));
    let (l_smp, n) = (params.l_smp() as usize, params.n as usize);
    if smp.len() < l_smp || sif.len() < n {
        t.abort = Some(AbortReason::InsufficientPulses);
        return Ok(t);
    }
    let pick = |from: &[usize], k: usize, rng: &mut ChaCha8Rng| {
        let mut v: Vec<usize> = index::sample(rng, from.len(), k)
            .into_iter()
            .map(|j| from[j])
            .collect();
        v.sort_unstable();
        v
    };
    t.i_smp = pick(&smp, l_smp, &mut rng);
    t.i_sif = pick(&sif, n, &mut rng);

    let s = estimate_chsh(&t)?;
    t.s_est = Some(s);
    if s < params.s0 {
        t.abort = Some(AbortReason::ChshFailed);
        return Ok(t);
    }

    let u = BitString::from_bits(t.i_sif.iter().map(|&i| t.pulses[i].r_a == -1));
    let u_bob = BitString::from_bits(t.i_sif.iter().map(|&i| t.pulses[i].r_b == -1));

    // error correction: syndrome accounting plus an oracle that hands Bob u
    let p_est = opts
        .p_est
        .unwrap_or(((1.0 - SQRT_2 * s) / 2.0).clamp(0.0, 0.5));
    let syn = conventional_syndrome_budget(params.n, params.f_ec, p_est)?;
    t.p_est = Some(p_est);
    t.syndrome_bits = Some(syn);
    t.syndrome_within_budget = Some(syn <= params.l_syn);
    let mut u_prime = u.clone();
    if opts.corrupt_corrected_key {
        let e = loop {
            let e = BitString::random(n, &mut rng);
            if e.count_ones() > 0 {
                break e;
            }
        };
        u_prime = u_prime.xor(&e)?;
    }

    let f_cor = ToeplitzHash::sample(n, params.verification_bits().clamp(1, n), &mut rng)?;
    let verified = f_cor.hash(&u)? == f_cor.hash(&u_prime)?;
    t.f_cor = Some(f_cor);
    t.sifted_key = Some(u.clone());
    t.bob_raw_key = Some(u_bob);
    t.corrected_key = Some(u_prime.clone());
    if !verified {
        t.abort = Some(AbortReason::VerifyFailed);
        return Ok(t);
    }

    let l = match opts.key_length {
        Some(l) => l,
        None => finite_key_length(params)?.l,
    }
    .min(params.n);
    t.key_length = l;
    if l == 0 {
        t.key_a = Some(BitString::zeros(0));
        t.key_b = Some(BitString::zeros(0));
    } else {
        let f_pa = ToeplitzHash::sample(n, l as usize, &mut rng)?;
        t.key_a = Some(f_pa.hash(&u)?);
        t.key_b = Some(f_pa.hash(&u_prime)?);
        t.f_pa = Some(f_pa);
    }
    Ok(t)
}

/// `(1/l_smp) Σ r_A r_B (−1)^t` over the sample pulses.
pub fn estimate_chsh(t: &Transcript) -> Result<f64> {
    if t.i_smp.is_empty() {
        return Err(Error::InvalidParams(
            "transcript has no sample pulses".into(),
        ));
    }
    let mut sum = 0i64;
    for &i in &t.i_smp {
        let r = t.pulses.get(i).ok_or(Error::MissingOutcomes(i))?;
        if r.r_a.abs() != 1 || r.r_b.abs() != 1 {
            return Err(Error::MissingOutcomes(i));
        }
        sum += i64::from(chsh_sign(r.r_a, r.r_b, r.basis_a, r.basis_b));
    }
    Ok(sum as f64 / t.i_smp.len() as f64)
}

/// Fraction of positions where `u` and `u_ref` differ.
pub fn qber(u: &BitString, u_ref: &BitString) -> Result<f64> {
    let d = u.hamming(u_ref)?;
    if u.is_empty() {
        return Err(Error::InvalidParams("qber of empty strings".into()));
    }
    Ok(d as f64 / u.len() as f64)
}

/// Fraction of `trials` label draws over N pulses that leave too few
/// both-smp or both-sif pulses.
pub fn selection_abort_frequency(params: &ProtocolParams, trials: usize, seed: u64) -> Result<f64> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be positive".into()));
    }
    let (n_pulses, l_smp, n) = (params.pulses(), params.l_smp(), params.n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut aborts = 0usize;
    for _ in 0..trials {
        let (mut smp, mut sif) = (0u64, 0u64);
        for _ in 0..n_pulses {
            let a = rng.random::<f64>() < params.q;
            let b = rng.random::<f64>() < params.q;
            match (a, b) {
                (true, true) => smp += 1,
                (false, false) => sif += 1,
                _ => {}
            }
        }
        if smp < l_smp || sif < n {
            aborts += 1;
        }
    }
    Ok(aborts as f64 / trials as f64)
}
