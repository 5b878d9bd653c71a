use std::f64::consts::FRAC_PI_4;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::chsh::build_chsh;
use crate::error::{Error, Result};
use crate::operator::{generalized_x, HermitianOperator, Phase, StateDensity};

/// Phases of the five detector observables, each realized as `X_γ`.
///
/// Alice measures `alice_z` or `alice_x`; Bob measures `bob_z` or `bob_x`
/// on sample pulses and `bob_sift` (the z′ basis) on sift pulses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorFrame {
    pub alice_z: Phase,
    pub alice_x: Phase,
    pub bob_z: Phase,
    pub bob_x: Phase,
    pub bob_sift: Phase,
}

impl DetectorFrame {
    /// Honest lab frame: Alice {Z, X}, Bob's sample bases turned by 45°
    /// to (Z ± X)/√2, and z′ = Z.
    pub fn calibrated() -> Self {
        Self {
            alice_z: Phase::ONE,
            alice_x: Phase::MINUS_I,
            bob_z: Phase::from_angle(-FRAC_PI_4),
            bob_x: Phase::from_angle(FRAC_PI_4),
            bob_sift: Phase::ONE,
        }
    }

    /// Reduced frame: Alice {Z, X_α}, Bob {Z, X_β}, z′ = Z.
    pub fn reduced(alpha: Phase, beta: Phase) -> Self {
        Self {
            alice_z: Phase::ONE,
            alice_x: alpha,
            bob_z: Phase::ONE,
            bob_x: beta,
            bob_sift: Phase::ONE,
        }
    }

    /// Alice's observables indexed [z, x].
    pub(crate) fn alice_observables(&self) -> [HermitianOperator; 2] {
        [generalized_x(self.alice_z), generalized_x(self.alice_x)]
    }

    /// Bob's observables indexed [z, x, z′].
    pub(crate) fn bob_observables(&self) -> [HermitianOperator; 3] {
        [
            generalized_x(self.bob_z),
            generalized_x(self.bob_x),
            generalized_x(self.bob_sift),
        ]
    }
}

/// One pulse as Eve prepares it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseSource {
    pub state: StateDensity,
    pub frame: DetectorFrame,
}

impl PulseSource {
    pub fn new(state: StateDensity, frame: DetectorFrame) -> Result<Self> {
        if state.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: state.dim(),
            });
        }
        Ok(Self { state, frame })
    }

    /// State measured with detector phases (α, β) in the reduced frame.
    pub fn reduced(state: StateDensity, alpha: Phase, beta: Phase) -> Result<Self> {
        Self::new(state, DetectorFrame::reduced(alpha, beta))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EveStrategy {
    /// Depolarized singlet-like Ψ⁺ in the calibrated frame; sifted QBER p.
    IidDepolarizing { p: f64 },
    /// Depolarized top eigenvector of the CHSH operator for (α, β), in the
    /// reduced frame.
    ConstantMisalignment { alpha: Phase, beta: Phase, p: f64 },
    /// One source per pulse, consumed in order.
    Custom(Vec<PulseSource>),
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::OutOfDomain {
            name: "p",
            value: p,
            domain: "[0, 1/2]",
        });
    }
    Ok(())
}

/// `(1 − 2p)|ψ⟩⟨ψ| + 2p·I/4`.
fn depolarize(psi: &[Complex64; 4], p: f64) -> Result<StateDensity> {
    StateDensity::pure(psi)?.mix(&StateDensity::maximally_mixed(4), 2.0 * p)
}

/// (|01⟩ + |10⟩)/√2, the +1 eigenvector of both ZZ and XX.
pub(crate) fn psi_plus() -> [Complex64; 4] {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let o = Complex64::new(0.0, 0.0);
    [o, h, h, o]
}

impl EveStrategy {
    /// The source shared by every pulse, or `None` for a custom list.
    pub fn iid_source(&self) -> Result<Option<PulseSource>> {
        match self {
            EveStrategy::IidDepolarizing { p } => {
                check_p(*p)?;
                let state = depolarize(&psi_plus(), *p)?;
                Ok(Some(PulseSource::new(state, DetectorFrame::calibrated())?))
            }
            EveStrategy::ConstantMisalignment { alpha, beta, p } => {
                check_p(*p)?;
                let m = build_chsh(*alpha, *beta);
                let top = m
                    .bell_basis
                    .iter()
                    .max_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue))
                    .expect("four Bell vectors");
                let state = depolarize(&top.vector, *p)?;
                Ok(Some(PulseSource::reduced(state, *alpha, *beta)?))
            }
            EveStrategy::Custom(_) => Ok(None),
        }
    }
}

impl fmt::Display for EveStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EveStrategy::IidDepolarizing { p } => write!(f, "iid_depolarizing(p={p})"),
            EveStrategy::ConstantMisalignment { alpha, beta, p } => write!(
                f,
                "constant_misalignment(alpha={}, beta={}, p={p})",
                alpha.value(),
                beta.value()
            ),
            EveStrategy::Custom(v) => write!(f, "custom({} pulses)", v.len()),
        }
    }
}
