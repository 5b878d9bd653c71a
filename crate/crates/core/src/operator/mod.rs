//! Dense complex linear algebra for qubit and qubit-pair operators.
//!
//! All matrices are stored in the y-basis: the computational basis vectors
//! are the eigenvectors of `Y`, so
//!
//! ```text
//! X = [[0, -i], [i, 0]]   Y = diag(1, -1)   Z = [[0, 1], [1, 0]]
//! ```
//!
//! and the generalized observable `X_γ = [[0, γ], [γ*, 0]]` interpolates
//! between them (`X = X_{-i}`, `Z = X_1`). Two-qubit operators use the
//! ordering |00⟩, |01⟩, |10⟩, |11⟩ with Alice's qubit first.

mod channel;
mod eigen;
mod matrix;
mod sampling;
mod state;

use std::fmt;
use std::ops::{Add, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use channel::QuantumChannel;
pub use eigen::{eigh, EigenSystem};
pub use matrix::Matrix;
pub use sampling::{born_probabilities, born_sample, sample_index};
pub use state::StateDensity;

use crate::error::{Error, Result};

/// Tolerance applied when validating user-supplied inputs.
pub const INPUT_TOL: f64 = 1e-12;
/// Tolerance applied to the results of computations.
pub const POST_TOL: f64 = 1e-10;

/// A unit-modulus complex number parametrizing a detector axis.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Phase(Complex64);

impl Phase {
    pub const ONE: Phase = Phase(Complex64::new(1.0, 0.0));
    pub const I: Phase = Phase(Complex64::new(0.0, 1.0));
    pub const MINUS_I: Phase = Phase(Complex64::new(0.0, -1.0));

    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("phase"));
        }
        let modulus = z.norm();
        if (modulus - 1.0).abs() > INPUT_TOL {
            return Err(Error::NonUnitModulus { modulus });
        }
        Ok(Self(z))
    }

    /// e^{iθ}.
    pub fn from_angle(theta: f64) -> Self {
        Self(Complex64::from_polar(1.0, theta))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn conj(self) -> Self {
        Self(self.0.conj())
    }

    pub fn angle(self) -> f64 {
        self.0.arg()
    }
}

impl TryFrom<[f64; 2]> for Phase {
    type Error = Error;
    fn try_from([re, im]: [f64; 2]) -> Result<Self> {
        Phase::new(Complex64::new(re, im))
    }
}

impl From<Phase> for [f64; 2] {
    fn from(p: Phase) -> Self {
        [p.0.re, p.0.im]
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Phase({:+.6}{:+.6}i)", self.0.re, self.0.im)
    }
}

/// Hermitian operator on one qubit (dim 2) or a qubit pair (dim 4).
#[derive(Clone, PartialEq)]
pub struct HermitianOperator(Matrix);

impl HermitianOperator {
    /// Validates Hermiticity to [`INPUT_TOL`] and the dimension.
    pub fn new(m: Matrix) -> Result<Self> {
        Self::with_tolerance(m, INPUT_TOL)
    }

    pub fn with_tolerance(m: Matrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        if !matches!(m.rows(), 2 | 4) {
            return Err(Error::UnsupportedDimension(m.rows()));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("operator"));
        }
        let deviation = m.hermiticity_defect();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self(m.hermitian_part()))
    }

    /// For results that are Hermitian in exact arithmetic.
    pub(crate) fn from_computed(m: Matrix) -> Self {
        debug_assert!(m.hermiticity_defect() < 1e-8, "{m:?}");
        Self(m.hermitian_part())
    }

    pub fn identity(dim: usize) -> Self {
        assert!(matches!(dim, 2 | 4));
        Self(Matrix::identity(dim))
    }

    pub fn zero(dim: usize) -> Self {
        assert!(matches!(dim, 2 | 4));
        Self(Matrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Tr[self · rho]; real because both factors are Hermitian.
    pub fn expectation(&self, rho: &StateDensity) -> f64 {
        self.0.trace_product(rho.matrix()).re
    }

    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        self.0.max_abs_diff(&other.0)
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator(&self.0 + &rhs.0)
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator(&self.0 - &rhs.0)
    }
}

impl fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian{:?}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Pauli matrix in the y-basis representation.
pub fn pauli(axis: Axis) -> HermitianOperator {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let m = match axis {
        Axis::X => Matrix::from_rows(&[[o, -i], [i, o]]),
        Axis::Y => Matrix::from_rows(&[[one, o], [o, -one]]),
        Axis::Z => Matrix::from_rows(&[[o, one], [one, o]]),
    };
    HermitianOperator(m)
}

/// `X_α = [[0, α], [α*, 0]]`; eigenvalues ±1.
pub fn generalized_x(alpha: Phase) -> HermitianOperator {
    let o = Complex64::new(0.0, 0.0);
    let a = alpha.value();
    HermitianOperator(Matrix::from_rows(&[[o, a], [a.conj(), o]]))
}

/// Kronecker product of two single-qubit operators.
pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    for op in [a, b] {
        if op.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: op.dim(),
            });
        }
    }
    Ok(HermitianOperator(a.0.kron(&b.0)))
}

pub fn hermitian_eig(m: &HermitianOperator) -> EigenSystem {
    eigen::jacobi(&m.0)
}

pub fn min_eigenvalue(m: &HermitianOperator) -> f64 {
    hermitian_eig(m).min_eigenvalue()
}

/// Nearest PSD matrix in Frobenius norm: negative eigenvalues set to zero.
pub fn eigen_clip(m: &Matrix) -> Matrix {
    let es = eigen::jacobi(&m.hermitian_part());
    let n = m.rows();
    let mut out = Matrix::zeros(n, n);
    for (lambda, v) in es.eigenvalues.iter().zip(&es.eigenvectors) {
        if *lambda > 0.0 {
            out = &out + &Matrix::outer(v, v).scale(*lambda);
        }
    }
    out.hermitian_part()
}

/// Smallest eigenvalue of an arbitrary-size Hermitian matrix.
pub fn min_eigenvalue_of(m: &Matrix) -> Result<f64> {
    Ok(eigh(m, POST_TOL)?.min_eigenvalue())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> HermitianOperator {
        pauli(Axis::X)
    }
    fn y() -> HermitianOperator {
        pauli(Axis::Y)
    }
    fn z() -> HermitianOperator {
        pauli(Axis::Z)
    }

    fn prod(a: &HermitianOperator, b: &HermitianOperator) -> Matrix {
        a.matrix() * b.matrix()
    }

    #[test]
    fn pauli_z_matches_y_basis_table() {
        let one = Complex64::new(1.0, 0.0);
        let o = Complex64::new(0.0, 0.0);
        assert_eq!(z().matrix(), &Matrix::from_rows(&[[o, one], [one, o]]));
    }

    #[test]
    fn paulis_square_to_identity_and_anticommute() {
        let id = Matrix::identity(2);
        for p in [x(), y(), z()] {
            assert!(prod(&p, &p).max_abs_diff(&id) < 1e-14);
        }
        for (a, b) in [(x(), y()), (y(), z()), (z(), x())] {
            let anti = &prod(&a, &b) + &prod(&b, &a);
            assert!(anti.max_abs() < 1e-14);
        }
        // right-handed: XY = iZ
        let xy = prod(&x(), &y());
        let iz = z().matrix().scale_complex(Complex64::new(0.0, 1.0));
        assert!(xy.max_abs_diff(&iz) < 1e-14);
    }

    #[test]
    fn generalized_x_interpolates() {
        assert_eq!(generalized_x(Phase::MINUS_I), x());
        assert_eq!(generalized_x(Phase::ONE), z());
        let es = hermitian_eig(&generalized_x(Phase::from_angle(
            std::f64::consts::PI / 7.0,
        )));
        assert!((es.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((es.eigenvalues[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn phase_rejects_non_unit_modulus() {
        assert!(matches!(
            Phase::new(Complex64::new(1.1, 0.0)),
            Err(Error::NonUnitModulus { .. })
        ));
        assert!(Phase::new(Complex64::new(f64::NAN, 0.0)).is_err());
        assert!(Phase::new(Complex64::new(0.6, 0.8)).is_ok());
    }

    #[test]
    fn tensor_products() {
        let id = HermitianOperator::identity(2);
        assert_eq!(tensor(&id, &id).unwrap(), HermitianOperator::identity(4));
        assert!(tensor(&z(), &z()).unwrap().trace().abs() < 1e-15);
        let zi = tensor(&z(), &id).unwrap();
        let iz = tensor(&id, &z()).unwrap();
        let zz = tensor(&z(), &z()).unwrap();
        assert!((zi.matrix() * iz.matrix()).max_abs_diff(zz.matrix()) < 1e-15);
        assert!(matches!(
            tensor(&zz, &id),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spectra_of_simple_operators() {
        let es = hermitian_eig(&z());
        assert_eq!(es.eigenvalues.len(), 2);
        assert!((es.eigenvalues[0] - 1.0).abs() < 1e-15);
        let zz = tensor(&z(), &z()).unwrap();
        let ev = hermitian_eig(&zz).eigenvalues;
        for (got, want) in ev.iter().zip([1.0, 1.0, -1.0, -1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!((min_eigenvalue(&HermitianOperator::identity(4)) - 1.0).abs() < 1e-15);
        let xx = tensor(&x(), &x()).unwrap();
        assert!((min_eigenvalue(&xx) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_operator_validation() {
        let bad = Matrix::from_rows(&[
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
        ]);
        assert!(matches!(
            HermitianOperator::new(bad),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            HermitianOperator::new(Matrix::identity(3)),
            Err(Error::UnsupportedDimension(3))
        ));
    }
}
