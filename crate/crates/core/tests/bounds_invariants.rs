use e91_squash::bounds::{
    asymptotic_rate, binary_entropy, chernoff_abort_bound, delta_s, finite_key_length,
    hmin_lower_bound, leftover_bound, mu_prime, mu_statistical, qber_threshold, ProtocolParams,
};
use e91_squash::protocol::selection_abort_frequency;

#[test]
fn rate_strictly_decreasing_to_threshold() {
    for f_ec in [1.0, 1.1, 1.2] {
        let top = qber_threshold(f_ec).unwrap();
        let r: Vec<f64> = (0..1000)
            .map(|k| asymptotic_rate(top * k as f64 / 999.0, f_ec).unwrap())
            .collect();
        assert!(r.windows(2).all(|w| w[1] < w[0]), "f_ec {f_ec}");
        assert!(r[999].abs() < 1e-9);
    }
}

#[test]
fn deviations_positive_and_vanishing() {
    let eps = 1e-9;
    let mut last = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for k in 2..=9 {
        let n = 10u64.pow(k);
        let l = n / 100;
        let cur = (
            delta_s(l, eps / 3.0),
            mu_statistical(n, l, eps / 3.0),
            mu_prime(n, l, eps),
        );
        assert!(cur.0 > 0.0 && cur.1 > 0.0 && cur.2 > 0.0);
        assert!(cur.0 < last.0 && cur.1 < last.1 && cur.2 < last.2);
        last = cur;
    }
    assert!(last.2 < 0.05);
}

fn generous(n: u64, s0: f64) -> ProtocolParams {
    let l_syn = (n as f64 * binary_entropy(0.01).unwrap()).ceil() as u64;
    ProtocolParams::new(n, 0.05, 0.05, s0, 1e-9, 1e-9, 1.0, l_syn).unwrap()
}

#[test]
fn key_length_assembles_from_min_entropy_and_leftover_hash() {
    for (n, s0) in [
        (100_000_000, 0.69),
        (100_000_000, 0.70),
        (1_000_000_000, 0.68),
    ] {
        let p = generous(n, s0);
        let r = finite_key_length(&p).unwrap();
        assert!(r.l > 0, "{r:?}");
        let c = r.components.unwrap();
        let amplification = 2.0 * (3.0 / p.eps).log2();
        assert_eq!(c.amplification, amplification);
        assert!((r.raw_length.unwrap() - (r.hmin_bound - amplification)).abs() <= 1e-6);
        // μ′ is exactly (1+√2)δS + μ, so the two min-entropy bounds coincide
        let direct = hmin_lower_bound(&p, p.eps / 3.0);
        assert!(
            (direct - r.hmin_bound).abs() <= 1e-6,
            "{direct} vs {}",
            r.hmin_bound
        );
        assert!(leftover_bound(r.hmin_bound, r.l, p.eps / 3.0) <= p.eps * (1.0 + 1e-9));
    }
}

#[test]
fn key_length_monotone_in_s0() {
    let mut last = 0;
    for k in 0..=20 {
        let l = finite_key_length(&generous(100_000_000, 0.66 + 0.002 * k as f64))
            .unwrap()
            .l;
        assert!(l >= last);
        last = l;
    }
    assert!(last > 0);
}

#[test]
fn selection_abort_frequency_within_chernoff_bound() {
    // N = 10⁴ exactly
    let p = ProtocolParams::new(4410, 0.3, 0.1, 0.5, 1e-9, 1e-9, 1.2, 4410).unwrap();
    assert_eq!(p.pulses(), 10_000);
    let bound = chernoff_abort_bound(&p);
    let freq = selection_abort_frequency(&p, 1000, 21).unwrap();
    assert!(
        freq <= bound.corrected_bound,
        "{freq} > {}",
        bound.corrected_bound
    );
    assert!(bound.size_free_bound > 1.99);
}

/// l/N against R(p) with q = n^−0.4 and δ = q, S0 = (1−2p)/√2,
/// l_syn = f_ec·h(p)·n.
#[test]
fn finite_rate_converges_to_asymptotic() {
    for p in [0.01, 0.02] {
        let target = asymptotic_rate(p, 1.0).unwrap();
        let mut gap = f64::INFINITY;
        for k in 5..=8 {
            let n = 10u64.pow(k);
            let q = (n as f64).powf(-0.4);
            let l_syn = (n as f64 * binary_entropy(p).unwrap()).ceil() as u64;
            let s0 = (1.0 - 2.0 * p) * std::f64::consts::FRAC_1_SQRT_2;
            let params = ProtocolParams::new(n, q, q, s0, 1e-9, 1e-9, 1.0, l_syn).unwrap();
            let r = finite_key_length(&params).unwrap();
            gap = (r.l as f64 / r.pulses as f64 - target).abs();
            println!(
                "p={p} n=1e{k} l_smp={} mu'={:.3} l={} gap={gap:.4}",
                r.l_smp, r.mu_prime, r.l
            );
        }
        assert!(gap <= 0.01, "p={p}: |l/N - R| = {gap} at n = 1e8");
    }
}
