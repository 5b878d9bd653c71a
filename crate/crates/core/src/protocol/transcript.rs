use serde::{Deserialize, Serialize};

use crate::bounds::ProtocolParams;
use crate::chsh::Basis;
use crate::error::Result;
use crate::hashing::{BitString, ToeplitzHash};

/// Bumped whenever the serialized layout changes.
pub const TRANSCRIPT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Smp,
    Sif,
}

/// Labels, bases and ±1 outcomes of one pulse. A `sif` label on Bob's side
/// means he measured z′; his basis is then recorded as `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PulseRecord {
    pub label_a: Label,
    pub label_b: Label,
    pub basis_a: Basis,
    pub basis_b: Basis,
    pub r_a: i8,
    pub r_b: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortReason {
    InsufficientPulses,
    ChshFailed,
    VerifyFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub schema: u32,
    pub seed: u64,
    pub strategy: String,
    pub params: ProtocolParams,
    pub pulses: Vec<PulseRecord>,
    /// Sample pulses, ascending.
    pub i_smp: Vec<usize>,
    /// Sift pulses, ascending.
    pub i_sif: Vec<usize>,
    pub s_est: Option<f64>,
    pub abort: Option<AbortReason>,
    /// Alice's sifted key u.
    pub sifted_key: Option<BitString>,
    /// Bob's raw bits on the sift pulses.
    pub bob_raw_key: Option<BitString>,
    /// Bob's key u′ after correction.
    pub corrected_key: Option<BitString>,
    pub p_est: Option<f64>,
    pub syndrome_bits: Option<u64>,
    pub syndrome_within_budget: Option<bool>,
    pub f_cor: Option<ToeplitzHash>,
    pub f_pa: Option<ToeplitzHash>,
    pub key_length: u64,
    pub key_a: Option<BitString>,
    pub key_b: Option<BitString>,
}

impl Transcript {
    /// Error rate between Alice's sifted key and Bob's raw bits.
    pub fn sifted_qber(&self) -> Option<Result<f64>> {
        match (&self.sifted_key, &self.bob_raw_key) {
            (Some(u), Some(v)) => Some(super::qber(u, v)),
            _ => None,
        }
    }

    pub fn aborted(&self) -> bool {
        self.abort.is_some()
    }
}
