use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

/// `h(p) = −p log₂ p − (1−p) log₂(1−p)`, with h(0) = h(1) = 0.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfDomain {
            name: "p",
            value: p,
            domain: "[0, 1]",
        });
    }
    Ok(entropy_unchecked(p))
}

pub(crate) fn entropy_unchecked(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

fn check_f_ec(f_ec: f64) -> Result<()> {
    if !(f_ec >= 1.0 && f_ec.is_finite()) {
        return Err(Error::OutOfDomain {
            name: "f_ec",
            value: f_ec,
            domain: "[1, inf)",
        });
    }
    Ok(())
}

/// Largest QBER for which `(2+√2)p` is still a probability.
pub const MAX_RATE_QBER: f64 = 1.0 / (2.0 + SQRT_2);

/// `R = 1 − h((2+√2)p) − f_ec h(p)`, not clamped at zero.
pub fn asymptotic_rate(p: f64, f_ec: f64) -> Result<f64> {
    check_f_ec(f_ec)?;
    if !(0.0..=MAX_RATE_QBER).contains(&p) {
        return Err(Error::OutOfDomain {
            name: "p",
            value: p,
            domain: "[0, 1/(2+sqrt 2)]",
        });
    }
    let phase = ((2.0 + SQRT_2) * p).min(1.0);
    Ok(1.0 - entropy_unchecked(phase) - f_ec * entropy_unchecked(p))
}

/// `1 − h(p) − f_ec h(p)`: the trusted-device reference curve.
pub fn device_dependent_rate(p: f64, f_ec: f64) -> Result<f64> {
    check_f_ec(f_ec)?;
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::OutOfDomain {
            name: "p",
            value: p,
            domain: "[0, 1/2]",
        });
    }
    Ok(1.0 - (1.0 + f_ec) * entropy_unchecked(p))
}

/// Root of [`asymptotic_rate`] in p, found by bisection to 1e-10.
///
/// Past `p = 1/(2(2+√2))` the phase-error entropy starts to fall again and
/// the curve turns back up, so the search stays on the branch where it is
/// decreasing.
pub fn qber_threshold(f_ec: f64) -> Result<f64> {
    check_f_ec(f_ec)?;
    let mut lo = 0.0;
    let mut hi = 0.5 * MAX_RATE_QBER;
    let f = |p: f64| asymptotic_rate(p, f_ec);
    if f(lo)? <= 0.0 || f(hi)? >= 0.0 {
        return Err(Error::NoSignChange);
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Root of [`device_dependent_rate`] on (0, 1/2).
pub fn device_dependent_threshold(f_ec: f64) -> Result<f64> {
    check_f_ec(f_ec)?;
    let (mut lo, mut hi) = (0.0, 0.5);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if device_dependent_rate(mid, f_ec)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert!((binary_entropy(0.11).unwrap() - 0.499_915_958_164_528).abs() < 1e-12);
        assert!((binary_entropy(0.3).unwrap() - binary_entropy(0.7).unwrap()).abs() < 1e-15);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn rate_values() {
        assert_eq!(asymptotic_rate(0.0, 1.0).unwrap(), 1.0);
        assert!((asymptotic_rate(0.02, 1.0).unwrap() - 0.499_071_437_571_873_9).abs() < 1e-12);
        assert!(asymptotic_rate(0.3, 1.0).is_err());
        assert!(asymptotic_rate(0.01, 0.9).is_err());
    }

    #[test]
    fn thresholds() {
        let p1 = qber_threshold(1.0).unwrap();
        assert!((p1 - 0.054).abs() <= 0.001);
        assert!((p1 - 0.054_640_579_896_014_6).abs() < 1e-9);
        assert!(asymptotic_rate(p1, 1.0).unwrap().abs() < 1e-9);
        let p12 = qber_threshold(1.2).unwrap();
        assert!(p12 < qber_threshold(1.1).unwrap() && qber_threshold(1.1).unwrap() < p1);
        assert!((p12 - 0.049_767_130_370_882_644).abs() < 1e-9);
        let dd = device_dependent_threshold(1.0).unwrap();
        assert!((dd - 0.110_027_864_438_359_57).abs() < 1e-9);
    }

    #[test]
    fn device_dependent_dominates() {
        // h((2+√2)p) ≥ h(p) needs (2+√2)p ≤ 1 − p
        let top = 1.0 / (3.0 + SQRT_2);
        for k in 0..=100 {
            let p = top * k as f64 / 100.0;
            assert!(
                device_dependent_rate(p, 1.0).unwrap() >= asymptotic_rate(p, 1.0).unwrap() - 1e-15
            );
        }
        assert_eq!(device_dependent_rate(0.0, 1.0).unwrap(), 1.0);
    }
}
