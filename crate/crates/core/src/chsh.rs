//! The CHSH operator `M = ¼(Z⊗Z + Z⊗X_β + X_α⊗Z − X_α⊗X_β)`, its Bell
//! eigensystem, the two-outcome POVM it induces, and the dominating
//! operator `M′`.
//!
//! ```
//! use e91_squash::chsh::build_chsh;
//! use e91_squash::operator::Phase;
//!
//! let m = build_chsh(Phase::MINUS_I, Phase::MINUS_I);
//! assert!((m.abs_mu - 0.5_f64.sqrt()).abs() < 1e-15);
//! assert!(m.abs_nu < 1e-15);
//! ```

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::operator::{
    generalized_x, pauli, tensor, Axis, HermitianOperator, Matrix, Phase, StateDensity,
};

/// Measurement basis label of one party.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    X,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 2] = [Basis::Z, Basis::X];
}

/// `t(c_A, c_B)`: 1 exactly when both parties used `x`.
pub fn t_flag(a: Basis, b: Basis) -> u8 {
    u8::from(a == Basis::X && b == Basis::X)
}

/// Signed CHSH summand `r_A · r_B · (−1)^t` for outcomes in {±1}.
pub fn chsh_sign(r_a: i8, r_b: i8, a: Basis, b: Basis) -> i8 {
    let s = r_a * r_b;
    if t_flag(a, b) == 1 {
        -s
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellLabel {
    /// (|00⟩ + e|11⟩)/√2, eigenvalue +|μ|
    PsiPlus,
    /// (|00⟩ − e|11⟩)/√2, eigenvalue −|μ|
    PsiMinus,
    /// (|01⟩ + e|10⟩)/√2, eigenvalue +|ν|
    PhiPlus,
    /// (|01⟩ − e|10⟩)/√2, eigenvalue −|ν|
    PhiMinus,
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BellLabel::PsiPlus => "Psi+",
            BellLabel::PsiMinus => "Psi-",
            BellLabel::PhiPlus => "Phi+",
            BellLabel::PhiMinus => "Phi-",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct BellVector {
    pub label: BellLabel,
    pub eigenvalue: f64,
    pub vector: [Complex64; 4],
}

impl BellVector {
    pub fn projector(&self) -> HermitianOperator {
        HermitianOperator::from_computed(Matrix::outer(&self.vector, &self.vector))
    }
}

/// CHSH operator for detector phases (α, β) with its spectral data.
#[derive(Debug, Clone)]
pub struct ChshMeasurement {
    pub alpha: Phase,
    pub beta: Phase,
    pub operator: HermitianOperator,
    pub mu: Complex64,
    pub nu: Complex64,
    pub abs_mu: f64,
    pub abs_nu: f64,
    /// atan2(|μ| − |ν|, |μ| + |ν|), in [−π/4, π/4].
    pub phi: f64,
    /// Ordered Ψ⁺, Ψ⁻, Φ⁺, Φ⁻.
    pub bell_basis: [BellVector; 4],
}

/// `Z` for basis z, `X_γ` for basis x.
pub fn detector_observable(gamma: Phase, c: Basis) -> HermitianOperator {
    match c {
        Basis::Z => pauli(Axis::Z),
        Basis::X => generalized_x(gamma),
    }
}

pub fn build_chsh(alpha: Phase, beta: Phase) -> ChshMeasurement {
    let z = pauli(Axis::Z);
    let xa = generalized_x(alpha);
    let xb = generalized_x(beta);
    let t = |a: &HermitianOperator, b: &HermitianOperator| tensor(a, b).expect("qubit factors");
    let sum = &(&(&t(&z, &z) + &t(&z, &xb)) + &t(&xa, &z)) - &t(&xa, &xb);
    let operator = sum.scale(0.25);

    let (a, b) = (alpha.value(), beta.value());
    let one = Complex64::new(1.0, 0.0);
    let mu = (one + a + b - a * b) * 0.25;
    let nu = (one + a + b.conj() - a * b.conj()) * 0.25;
    let (abs_mu, abs_nu) = (mu.norm(), nu.norm());
    let phi = (abs_mu - abs_nu).atan2(abs_mu + abs_nu);

    let bell_basis = bell_vectors(mu, nu);
    ChshMeasurement {
        alpha,
        beta,
        operator,
        mu,
        nu,
        abs_mu,
        abs_nu,
        phi,
        bell_basis,
    }
}

// ⟨00|M|11⟩ = μ and ⟨01|M|10⟩ = ν, so the +|μ| eigenvector carries the
// conjugate phase μ*/|μ| on |11⟩.
fn unit_phase(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r < 1e-15 {
        Complex64::new(1.0, 0.0)
    } else {
        z.conj() / r
    }
}

fn bell_vectors(mu: Complex64, nu: Complex64) -> [BellVector; 4] {
    let o = Complex64::new(0.0, 0.0);
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let em = unit_phase(mu) * FRAC_1_SQRT_2;
    let en = unit_phase(nu) * FRAC_1_SQRT_2;
    [
        BellVector {
            label: BellLabel::PsiPlus,
            eigenvalue: mu.norm(),
            vector: [h, o, o, em],
        },
        BellVector {
            label: BellLabel::PsiMinus,
            eigenvalue: -mu.norm(),
            vector: [h, o, o, -em],
        },
        BellVector {
            label: BellLabel::PhiPlus,
            eigenvalue: nu.norm(),
            vector: [o, h, en, o],
        },
        BellVector {
            label: BellLabel::PhiMinus,
            eigenvalue: -nu.norm(),
            vector: [o, h, -en, o],
        },
    ]
}

impl ChshMeasurement {
    /// Σ λ |v⟩⟨v| over the Bell basis.
    pub fn spectral_reconstruction(&self) -> Matrix {
        let mut m = Matrix::zeros(4, 4);
        for bv in &self.bell_basis {
            m = &m + &Matrix::outer(&bv.vector, &bv.vector).scale(bv.eigenvalue);
        }
        m
    }

    /// Max-entry residual of the spectral identity.
    pub fn spectral_residual(&self) -> f64 {
        self.spectral_reconstruction()
            .max_abs_diff(self.operator.matrix())
    }

    /// Largest |⟨vᵢ|vⱼ⟩ − δᵢⱼ| over the Bell basis.
    pub fn bell_orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, u) in self.bell_basis.iter().enumerate() {
            for (j, v) in self.bell_basis.iter().enumerate() {
                let ip: Complex64 = u
                    .vector
                    .iter()
                    .zip(&v.vector)
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).norm());
            }
        }
        worst
    }

    /// The single-qubit observable Bob measures in basis `c` (reduced frame).
    pub fn bob_observable(&self, c: Basis) -> HermitianOperator {
        detector_observable(self.beta, c)
    }

    pub fn alice_observable(&self, c: Basis) -> HermitianOperator {
        detector_observable(self.alpha, c)
    }
}

/// `E± = ½(I ± M)`.
pub fn chsh_povm(m: &ChshMeasurement) -> (HermitianOperator, HermitianOperator) {
    let id = HermitianOperator::identity(4);
    let plus = (&id + &m.operator).scale(0.5);
    let minus = (&id - &m.operator).scale(0.5);
    (plus, minus)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PovmMixtureReport {
    /// Tr[E₊ρ].
    pub povm_probability: f64,
    /// Pr[s = +1] from the four projective measurements, mixed uniformly.
    pub mixture_probability: f64,
    pub difference: f64,
}

/// Compares Tr[E₊ρ] with Pr[s = +1] when a uniformly random basis pair is
/// measured projectively and the outcomes are combined as `r_A r_B (−1)^t`.
pub fn povm_equals_local_mixture(m: &ChshMeasurement, rho: &StateDensity) -> PovmMixtureReport {
    let (e_plus, _) = chsh_povm(m);
    let povm_probability = e_plus.expectation(rho);

    let id = Matrix::identity(2);
    let half_projector = |obs: &HermitianOperator, r: i8| -> Matrix {
        (&id + &obs.matrix().scale(f64::from(r))).scale(0.5)
    };
    let mut mixture_probability = 0.0;
    for ca in Basis::ALL {
        for cb in Basis::ALL {
            let a = m.alice_observable(ca);
            let b = m.bob_observable(cb);
            for ra in [1i8, -1] {
                for rb in [1i8, -1] {
                    if chsh_sign(ra, rb, ca, cb) != 1 {
                        continue;
                    }
                    let proj = half_projector(&a, ra).kron(&half_projector(&b, rb));
                    mixture_probability += 0.25 * proj.trace_product(rho.matrix()).re;
                }
            }
        }
    }
    PovmMixtureReport {
        povm_probability,
        mixture_probability,
        difference: (povm_probability - mixture_probability).abs(),
    }
}

/// `M′ = M + 2|μ| |Ψ⁻⟩⟨Ψ⁻| + 2|ν| |Φ⁻⟩⟨Φ⁻|` and the angle φ.
pub fn mprime(m: &ChshMeasurement) -> (HermitianOperator, f64) {
    let mut op = m.operator.matrix().clone();
    for bv in &m.bell_basis {
        if bv.eigenvalue < 0.0 {
            op = &op + &Matrix::outer(&bv.vector, &bv.vector).scale(-2.0 * bv.eigenvalue);
        }
    }
    (HermitianOperator::from_computed(op), m.phi)
}

/// `½(cos φ I + sin φ Y⊗Y)`.
pub fn mprime_closed_form(phi: f64) -> HermitianOperator {
    let (s, c) = phi.sin_cos();
    let yy = tensor(&pauli(Axis::Y), &pauli(Axis::Y)).expect("qubit factors");
    &HermitianOperator::identity(4).scale(0.5 * c) + &yy.scale(0.5 * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{hermitian_eig, min_eigenvalue};
    use std::f64::consts::{FRAC_PI_4, PI};

    fn grid(k: usize) -> impl Iterator<Item = (Phase, Phase)> {
        (0..k).flat_map(move |i| {
            (0..k).map(move |j| {
                (
                    Phase::from_angle(2.0 * PI * i as f64 / k as f64),
                    Phase::from_angle(2.0 * PI * j as f64 / k as f64),
                )
            })
        })
    }

    #[test]
    fn ideal_alignment_spectrum() {
        let m = build_chsh(Phase::MINUS_I, Phase::MINUS_I);
        assert!((m.abs_mu - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(m.abs_nu < 1e-15);
        let ev = hermitian_eig(&m.operator).eigenvalues;
        for (got, want) in ev.iter().zip([FRAC_1_SQRT_2, 0.0, 0.0, -FRAC_1_SQRT_2]) {
            assert!((got - want).abs() < 1e-12, "{ev:?}");
        }
        assert!((m.phi - FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn aligned_z_detectors() {
        let m = build_chsh(Phase::ONE, Phase::ONE);
        let zz = tensor(&pauli(Axis::Z), &pauli(Axis::Z)).unwrap().scale(0.5);
        assert!(m.operator.max_abs_diff(&zz) < 1e-15);
        assert!((m.abs_mu - 0.5).abs() < 1e-15);
        assert!((m.abs_nu - 0.5).abs() < 1e-15);
        let (mp, phi) = mprime(&m);
        assert!(phi.abs() < 1e-15);
        assert!(mp.max_abs_diff(&HermitianOperator::identity(4).scale(0.5)) < 1e-15);
    }

    #[test]
    fn spectral_identity_and_normalization_on_grid() {
        for (a, b) in grid(16) {
            let m = build_chsh(a, b);
            assert!((m.abs_mu.powi(2) + m.abs_nu.powi(2) - 0.5).abs() < 1e-12);
            assert!(m.spectral_residual() < 1e-10);
            assert!(m.bell_orthonormality_defect() < 1e-10);
            assert!(m.phi.abs() <= FRAC_PI_4 + 1e-12);
        }
    }

    #[test]
    fn povm_elements() {
        let m = build_chsh(Phase::MINUS_I, Phase::MINUS_I);
        let (ep, em) = chsh_povm(&m);
        assert!((&ep + &em).max_abs_diff(&HermitianOperator::identity(4)) < 1e-15);
        assert!((min_eigenvalue(&ep) - 0.5 * (1.0 - FRAC_1_SQRT_2)).abs() < 1e-12);
    }

    #[test]
    fn mixture_matches_povm_on_maximally_mixed() {
        let rho = StateDensity::maximally_mixed(4);
        for (a, b) in grid(5) {
            let r = povm_equals_local_mixture(&build_chsh(a, b), &rho);
            assert!(r.difference < 1e-12);
            assert!((r.povm_probability - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn mixture_on_top_eigenstate() {
        let m = build_chsh(Phase::MINUS_I, Phase::MINUS_I);
        let rho = StateDensity::pure(&m.bell_basis[0].vector).unwrap();
        let r = povm_equals_local_mixture(&m, &rho);
        let want = 0.5 * (1.0 + FRAC_1_SQRT_2);
        assert!((r.povm_probability - want).abs() < 1e-12);
        assert!((r.mixture_probability - want).abs() < 1e-12);
    }

    #[test]
    fn mprime_dominates_and_matches_closed_form() {
        for (a, b) in grid(12) {
            let m = build_chsh(a, b);
            let (mp, phi) = mprime(&m);
            assert!(min_eigenvalue(&(&mp - &m.operator)) >= -1e-10);
            assert!(mp.max_abs_diff(&mprime_closed_form(phi)) < 1e-10);
            assert!((phi.cos() - (m.abs_mu + m.abs_nu)).abs() < 1e-12);
            assert!((phi.sin() - (m.abs_mu - m.abs_nu)).abs() < 1e-12);
        }
    }

    #[test]
    fn sign_convention() {
        assert_eq!(t_flag(Basis::X, Basis::X), 1);
        assert_eq!(t_flag(Basis::Z, Basis::X), 0);
        assert_eq!(chsh_sign(1, 1, Basis::X, Basis::X), -1);
        assert_eq!(chsh_sign(-1, -1, Basis::Z, Basis::X), 1);
        assert_eq!(chsh_sign(1, -1, Basis::Z, Basis::Z), -1);
    }
}
