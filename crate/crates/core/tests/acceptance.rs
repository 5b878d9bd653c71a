//! One PASS/FAIL line per acceptance criterion, each with its time limit.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::{Duration, Instant};

use e91_squash::bounds::{
    asymptotic_rate, azuma_tail, binary_entropy, finite_key_length, qber_threshold, ProtocolParams,
};
use e91_squash::chsh::build_chsh;
use e91_squash::hashing::{BitString, ToeplitzHash};
use e91_squash::operator::{generalized_x, hermitian_eig, pauli, Axis, Phase, StateDensity};
use e91_squash::protocol::{povm_noise_experiment, run_protocol, EveStrategy};
use e91_squash::squash::{
    build_squash, onepartite_squash_feasibility, verify_squash_conditions, FeasibilityStatus,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Criterion = (&'static str, fn() -> Outcome, u64);

struct Outcome {
    pass: bool,
    detail: String,
}

fn grid(k: usize) -> Vec<(Phase, Phase)> {
    let ph = |i: usize| Phase::from_angle(2.0 * PI * i as f64 / k as f64);
    (0..k * k).map(|idx| (ph(idx / k), ph(idx % k))).collect()
}

fn c1_threshold() -> Outcome {
    // the rate-curve grid, 1e-4 apart
    let ps: Vec<f64> = (0..=1500).map(|k| 0.15 * k as f64 / 1500.0).collect();
    let r: Vec<f64> = ps
        .iter()
        .map(|&p| asymptotic_rate(p, 1.0).unwrap())
        .collect();
    let k = r.windows(2).position(|w| w[0] > 0.0 && w[1] <= 0.0);
    let root = qber_threshold(1.0).unwrap();
    match k {
        Some(k) => Outcome {
            pass: (root - 0.054).abs() <= 0.001 && ps[k] <= root && root <= ps[k + 1],
            detail: format!(
                "zero in [{:.4}, {:.4}], bisection {root:.6}",
                ps[k],
                ps[k + 1]
            ),
        },
        None => Outcome {
            pass: false,
            detail: "no sign change on the grid".into(),
        },
    }
}

fn c2_endpoints() -> Outcome {
    let r0 = asymptotic_rate(0.0, 1.0).unwrap();
    let top = qber_threshold(1.0).unwrap();
    let r: Vec<f64> = (0..1000)
        .map(|k| asymptotic_rate(top * k as f64 / 999.0, 1.0).unwrap())
        .collect();
    let decreasing = r.windows(2).all(|w| w[1] < w[0]);
    Outcome {
        pass: r0 == 1.0 && decreasing,
        detail: format!("R(0) = {r0}, strictly decreasing: {decreasing}"),
    }
}

fn c3_normalization() -> Outcome {
    let worst = grid(64)
        .iter()
        .map(|&(a, b)| {
            let m = build_chsh(a, b);
            (m.abs_mu.powi(2) + m.abs_nu.powi(2) - 0.5).abs()
        })
        .fold(0.0, f64::max);
    Outcome {
        pass: worst <= 1e-12,
        detail: format!("max ||mu|^2 + |nu|^2 - 1/2| = {worst:.2e}"),
    }
}

fn c4_spectrum() -> Outcome {
    let (res, mag) = grid(64)
        .par_iter()
        .map(|&(a, b)| {
            let m = build_chsh(a, b);
            let eig = hermitian_eig(&m.operator);
            let mag = eig
                .eigenvalues
                .iter()
                .chain(m.bell_basis.iter().map(|v| &v.eigenvalue))
                .map(|e| e.abs())
                .fold(0.0, f64::max);
            (m.spectral_residual(), mag)
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0.max(y.0), x.1.max(y.1)));
    Outcome {
        pass: res <= 1e-10 && mag <= FRAC_1_SQRT_2 + 1e-12,
        detail: format!(
            "reconstruction {res:.2e}, max |eigenvalue| - 1/sqrt2 = {:.2e}",
            mag - FRAC_1_SQRT_2
        ),
    }
}

fn c5_squash() -> Outcome {
    let reports: Vec<_> = grid(64)
        .par_iter()
        .map(|&(a, b)| verify_squash_conditions(&build_squash(a, b), 1e-9))
        .collect();
    let max = |f: fn(&e91_squash::squash::SquashConditionReport) -> f64| {
        reports.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
    };
    let min = |f: fn(&e91_squash::squash::SquashConditionReport) -> f64| {
        reports.iter().map(f).fold(f64::INFINITY, f64::min)
    };
    let cond1 = max(|r| r.cond1_residual);
    let cond2 = min(|r| r.cond2_min_eig);
    let gap = min(|r| r.mprime_gap_min_eig);
    let n = min(|r| r.n_min_eig);
    let all = reports.iter().all(|r| r.pass);
    Outcome {
        pass: all && cond1 <= 1e-12 && cond2 >= -1e-9 && gap >= -1e-9 && n >= -1e-9,
        detail: format!("cond1 {cond1:.2e}, cond2 {cond2:.2e}, M'-M {gap:.2e}, N {n:.2e}"),
    }
}

fn c6_nogo() -> Outcome {
    let z = pauli(Axis::Z);
    let status = |a: Phase| {
        onepartite_squash_feasibility(&generalized_x(a), &z)
            .unwrap()
            .status
    };
    let axis_ok = [Phase::I, Phase::MINUS_I]
        .into_iter()
        .all(|a| status(a) == FeasibilityStatus::Feasible);
    let off: Vec<FeasibilityStatus> = (0..16)
        .into_par_iter()
        .map(|k| status(Phase::from_angle(2.0 * PI * (k as f64 + 0.5) / 16.0)))
        .collect();
    let infeasible = off
        .iter()
        .filter(|s| **s == FeasibilityStatus::Infeasible)
        .count();
    Outcome {
        pass: axis_ok && infeasible == 16,
        detail: format!("+-i feasible: {axis_ok}, off-axis infeasible {infeasible}/16"),
    }
}

fn c7_simulation() -> Outcome {
    let params = ProtocolParams::new(44_100, 0.3, 0.1, 0.0, 1e-9, 1e-9, 1.2, 44_100).unwrap();
    let runs = 100u64;
    let mut pass = params.pulses() == 100_000;
    let mut detail = Vec::new();
    for (i, p) in [0.0, 0.02, 0.05, 0.1].into_iter().enumerate() {
        let eve = EveStrategy::IidDepolarizing { p };
        let stats: Vec<Option<(f64, f64)>> = (0..runs)
            .into_par_iter()
            .map(|r| {
                let t = run_protocol(&params, &eve, 1000 * i as u64 + r).unwrap();
                Some((t.s_est?, t.sifted_qber()?.unwrap()))
            })
            .collect();
        let ok: Vec<(f64, f64)> = stats.into_iter().flatten().collect();
        let m = ok.len() as f64;
        let s_mean = ok.iter().map(|x| x.0).sum::<f64>() / m;
        let q_mean = ok.iter().map(|x| x.1).sum::<f64>() / m;
        let e = (1.0 - 2.0 * p) * FRAC_1_SQRT_2;
        let sigma_s = ((1.0 - e * e) / (params.l_smp() as f64 * m)).sqrt();
        let sigma_q = (p * (1.0 - p) / (params.n as f64 * m)).sqrt();
        let good = ok.len() as u64 == runs
            && (s_mean - e).abs() <= 4.0 * sigma_s
            && (q_mean - p).abs() <= 4.0 * sigma_q + 1e-15;
        pass &= good;
        detail.push(format!("p={p}: S {s_mean:.4} vs {e:.4}, QBER {q_mean:.4}"));
    }
    Outcome {
        pass,
        detail: detail.join("; "),
    }
}

fn c8_convergence() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for p in [0.01, 0.02] {
        let n = 100_000_000u64;
        let q = (n as f64).powf(-0.4);
        let l_syn = (n as f64 * binary_entropy(p).unwrap()).ceil() as u64;
        let params = ProtocolParams::new(
            n,
            q,
            q,
            (1.0 - 2.0 * p) * FRAC_1_SQRT_2,
            1e-9,
            1e-9,
            1.0,
            l_syn,
        )
        .unwrap();
        let r = finite_key_length(&params).unwrap();
        let gap = (r.l as f64 / r.pulses as f64 - asymptotic_rate(p, 1.0).unwrap()).abs();
        pass &= gap <= 0.01;
        detail.push(format!(
            "p={p}: l_smp {}, l {}, |l/N - R| {gap:.4}",
            r.l_smp, r.l
        ));
    }
    Outcome {
        pass,
        detail: detail.join("; "),
    }
}

fn c9_hashing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pass = true;
    let mut detail = Vec::new();
    for out in [4usize, 8, 12] {
        let x = BitString::random(32, &mut rng);
        let mut y = x.clone();
        y.flip(5);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| {
                let h = ToeplitzHash::sample(32, out, &mut rng).unwrap();
                h.hash(&x).unwrap() == h.hash(&y).unwrap()
            })
            .count();
        let bound = 2f64.powi(-(out as i32));
        let freq = hits as f64 / trials as f64;
        let ok = freq <= bound + 3.0 * (bound * (1.0 - bound) / trials as f64).sqrt();
        let h = ToeplitzHash::sample(32, out, &mut rng).unwrap();
        let linear = (0..1000).all(|_| {
            let (a, b) = (
                BitString::random(32, &mut rng),
                BitString::random(32, &mut rng),
            );
            h.hash(&a.xor(&b).unwrap()).unwrap()
                == h.hash(&a).unwrap().xor(&h.hash(&b).unwrap()).unwrap()
        });
        pass &= ok && linear;
        detail.push(format!("out {out}: {freq:.5} vs {bound:.5}"));
    }
    Outcome {
        pass,
        detail: detail.join("; "),
    }
}

fn c10_azuma() -> Outcome {
    let m = build_chsh(Phase::MINUS_I, Phase::MINUS_I);
    let top = &m.bell_basis[0];
    let rho = StateDensity::pure(&top.vector)
        .unwrap()
        .mix(&StateDensity::maximally_mixed(4), 0.1)
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let r = povm_noise_experiment(&m, &rho, 4800, 10_000, 0.1, &mut rng).unwrap();
    Outcome {
        pass: r.empirical_tail <= azuma_tail(4800, 0.1),
        detail: format!(
            "tail {:.4} vs bound {:.4}, max |dS| {:.4}",
            r.empirical_tail, r.azuma_bound, r.max_abs_difference
        ),
    }
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("QBER threshold near 5.4%", c1_threshold, 1),
        ("rate endpoints and monotonicity", c2_endpoints, 1),
        ("mu/nu normalization", c3_normalization, 5),
        ("Bell spectral identity", c4_spectrum, 10),
        ("bipartite squash conditions", c5_squash, 30),
        ("single-party no-go", c6_nogo, 60),
        ("simulation statistics", c7_simulation, 120),
        ("finite-to-asymptotic convergence", c8_convergence, 1),
        ("universal2 hashing", c9_hashing, 30),
        ("Azuma concentration", c10_azuma, 120),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took < Duration::from_secs(*limit);
        println!(
            "criterion {:>2} {}: {name} ({:.2} s, limit {limit} s) {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            out.detail
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
