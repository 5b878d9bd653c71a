use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use super::ChoiMatrix;
use crate::chsh::{build_chsh, mprime, ChshMeasurement};
use crate::error::{Error, Result};
use crate::operator::{
    min_eigenvalue, pauli, tensor, Axis, HermitianOperator, Matrix, Phase, QuantumChannel,
};

/// Flip amplitude `a = Sign(sin φ) · min(1, (1+√2)|sin φ|)`.
///
/// This is the sign for which `F†(X⊗X) = a Y⊗Y` makes the squashed CHSH
/// inequality hold; with the opposite sign it fails already at φ = π/4.
pub fn flip_amplitude(phi: f64) -> Result<f64> {
    if !phi.is_finite() || phi.abs() > FRAC_PI_4 + 1e-12 {
        return Err(Error::OutOfDomain {
            name: "phi",
            value: phi,
            domain: "[-pi/4, pi/4]",
        });
    }
    let s = phi.sin();
    if s == 0.0 {
        return Ok(0.0);
    }
    Ok(s.signum() * ((1.0 + SQRT_2) * s.abs()).min(1.0))
}

/// `e^{−iπZ/4} = (I − iZ)/√2`, the quarter turn about Z.
pub fn quarter_z_rotation() -> Matrix {
    let z = pauli(Axis::Z);
    let minus_i = Complex64::new(0.0, -1.0);
    (&Matrix::identity(2) + &z.matrix().scale_complex(minus_i)).scale(FRAC_1_SQRT_2)
}

/// Bipartite squash channel for detector phases (α, β).
#[derive(Debug, Clone)]
pub struct SquashChannel {
    pub alpha: Phase,
    pub beta: Phase,
    pub channel: QuantumChannel,
    pub flip_amplitude: f64,
    pub phi: f64,
    pub chsh: ChshMeasurement,
}

/// Quarter Z turn on both qubits, then with probability (1−a)/2 a half
/// turn on Bob's qubit.
pub fn build_squash(alpha: Phase, beta: Phase) -> SquashChannel {
    let chsh = build_chsh(alpha, beta);
    let phi = chsh.phi;
    let a = flip_amplitude(phi.clamp(-FRAC_PI_4, FRAC_PI_4)).expect("phi is clamped");
    let r = quarter_z_rotation();
    let z = pauli(Axis::Z).into_matrix();
    let k_keep = r.kron(&r).scale(((1.0 + a) / 2.0).sqrt());
    let k_flip = r.kron(&(&z * &r)).scale(((1.0 - a) / 2.0).sqrt());
    let channel = QuantumChannel::new(4, 4, vec![k_keep, k_flip]).expect("rotations are unitary");
    SquashChannel {
        alpha,
        beta,
        channel,
        flip_amplitude: a,
        phi,
        chsh,
    }
}

impl SquashChannel {
    pub fn choi(&self) -> ChoiMatrix {
        ChoiMatrix::from_channel(&self.channel)
    }

    pub fn adjoint(&self, obs: &HermitianOperator) -> HermitianOperator {
        self.channel
            .adjoint_apply(obs)
            .expect("two-qubit observable")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SquashConditionReport {
    /// ‖F†(Z⊗I) − Z⊗I‖_max
    pub cond1_residual: f64,
    /// λ_min(F†(I + (√2−1)X⊗X) − 2M)
    pub cond2_min_eig: f64,
    /// λ_min((1+√2)(I − 2M′) + F†(X⊗X))
    pub n_min_eig: f64,
    /// λ_min(M′ − M)
    pub mprime_gap_min_eig: f64,
    /// ‖F†(X⊗X) − a Y⊗Y‖_max
    pub xx_residual: f64,
    pub choi_min_eig: f64,
    pub completeness_residual: f64,
    pub pass: bool,
}

pub fn verify_squash_conditions(sq: &SquashChannel, tol: f64) -> SquashConditionReport {
    let id2 = HermitianOperator::identity(2);
    let id4 = HermitianOperator::identity(4);
    let (x, y, z) = (pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z));
    let zi = tensor(&z, &id2).expect("qubits");
    let xx = tensor(&x, &x).expect("qubits");
    let yy = tensor(&y, &y).expect("qubits");
    let m = &sq.chsh.operator;

    let cond1_residual = sq.adjoint(&zi).max_abs_diff(&zi);
    let f_xx = sq.adjoint(&xx);
    let lhs = &sq.adjoint(&id4) + &f_xx.scale(SQRT_2 - 1.0);
    let cond2_min_eig = min_eigenvalue(&(&lhs - &m.scale(2.0)));

    let (mp, _) = mprime(&sq.chsh);
    let n_op = &(&id4 - &mp.scale(2.0)).scale(1.0 + SQRT_2) + &f_xx;
    let n_min_eig = min_eigenvalue(&n_op);
    let mprime_gap_min_eig = min_eigenvalue(&(&mp - m));
    let xx_residual = f_xx.max_abs_diff(&yy.scale(sq.flip_amplitude));
    let choi_min_eig = sq.choi().min_eigenvalue();
    let completeness_residual = sq.channel.completeness_residual();

    let pass = cond1_residual <= tol && cond2_min_eig >= -tol;
    SquashConditionReport {
        cond1_residual,
        cond2_min_eig,
        n_min_eig,
        mprime_gap_min_eig,
        xx_residual,
        choi_min_eig,
        completeness_residual,
        pass,
    }
}
