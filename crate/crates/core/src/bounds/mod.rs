//! Entropy, asymptotic rates and finite-size key-length bounds.
//!
//! ```
//! use e91_squash::bounds::{asymptotic_rate, qber_threshold};
//!
//! let p = qber_threshold(1.0).unwrap();
//! assert!((p - 0.0546).abs() < 1e-3);
//! assert!(asymptotic_rate(p, 1.0).unwrap().abs() < 1e-9);
//! ```

mod finite;
mod rates;

pub use finite::{
    azuma_tail, chernoff_abort_bound, conventional_syndrome_budget, delta_s, finite_key_length,
    hmin_lower_bound, leftover_bound, mu_prime, mu_statistical, ChernoffReport,
    KeyLengthComponents, KeyLengthReport, ProtocolParams,
};
pub use rates::{
    asymptotic_rate, binary_entropy, device_dependent_rate, device_dependent_threshold,
    qber_threshold, MAX_RATE_QBER,
};
