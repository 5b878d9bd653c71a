//! Monte Carlo simulation of the entanglement-based protocol in the qubit
//! picture: the adversary hands over a two-qubit state and detector phases
//! per pulse, the honest parties label, measure, test, sift, correct,
//! verify and amplify.
//!
//! ```
//! use e91_squash::bounds::ProtocolParams;
//! use e91_squash::protocol::{run_protocol, EveStrategy};
//!
//! let params = ProtocolParams::new(2000, 0.3, 0.1, 0.5, 1e-3, 1e-6, 1.2, 2000).unwrap();
//! let t = run_protocol(&params, &EveStrategy::IidDepolarizing { p: 0.0 }, 1).unwrap();
//! assert!(t.abort.is_none());
//! assert_eq!(t.sifted_qber().unwrap().unwrap(), 0.0);
//! ```

mod noise;
mod run;
mod strategy;
mod transcript;

pub use noise::{noise_experiment_from_weights, povm_noise_experiment, NoiseReport};
pub use run::{
    estimate_chsh, joint_probabilities, measure_pulses, qber, run_protocol, run_protocol_with,
    selection_abort_frequency, SimOptions,
};
pub use strategy::{DetectorFrame, EveStrategy, PulseSource};
pub use transcript::{AbortReason, Label, PulseRecord, Transcript, TRANSCRIPT_SCHEMA};
