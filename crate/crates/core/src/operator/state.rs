use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{eigen, HermitianOperator, Matrix, INPUT_TOL, POST_TOL};
use crate::error::{Error, Result};

/// Density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDensity(Matrix);

impl StateDensity {
    /// Validates Hermiticity to 1e-12, and trace and positivity to 1e-10.
    pub fn new(m: Matrix) -> Result<Self> {
        Self::validate(m, INPUT_TOL)
    }

    /// Same checks with a looser Hermiticity tolerance, for outputs of
    /// channel application.
    pub(crate) fn from_computed(m: Matrix) -> Result<Self> {
        Self::validate(m, POST_TOL)
    }

    fn validate(m: Matrix, herm_tol: f64) -> Result<Self> {
        if !m.is_square() || m.rows() == 0 {
            return Err(Error::InvalidState("matrix must be square".into()));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("density matrix"));
        }
        let deviation = m.hermiticity_defect();
        if deviation > herm_tol {
            return Err(Error::NotHermitian { deviation });
        }
        let m = m.hermitian_part();
        let tr = m.trace().re;
        if (tr - 1.0).abs() > POST_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = eigen::jacobi(&m).min_eigenvalue();
        if min < -POST_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self(m))
    }

    /// |ψ⟩⟨ψ| for a vector normalized here.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self(Matrix::outer(&v, &v).hermitian_part()))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(Matrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// (1 − w)·self + w·other.
    pub fn mix(&self, other: &StateDensity, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::OutOfDomain {
                name: "mixing weight",
                value: w,
                domain: "[0, 1]",
            });
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self(&self.0.scale(1.0 - w) + &other.0.scale(w)))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn expectation(&self, obs: &HermitianOperator) -> f64 {
        obs.expectation(self)
    }
}

impl Serialize for StateDensity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .map(|j| [self.0[(i, j)].re, self.0[(i, j)].im])
                    .collect()
            })
            .collect();
        let mut st = s.serialize_struct("StateDensity", 2)?;
        st.serialize_field("dim", &self.dim())?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_trace_and_negativity() {
        let m = Matrix::identity(2);
        assert!(matches!(StateDensity::new(m), Err(Error::InvalidState(_))));
        let m = Matrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(matches!(StateDensity::new(m), Err(Error::InvalidState(_))));
    }

    #[test]
    fn pure_state_is_normalized() {
        let rho =
            StateDensity::pure(&[Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)]).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
        assert!((rho.matrix()[(0, 0)].re - 0.36).abs() < 1e-15);
    }

    #[test]
    fn mixing_stays_valid() {
        let a = StateDensity::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let b = StateDensity::maximally_mixed(2);
        let m = a.mix(&b, 0.25).unwrap();
        assert!((m.matrix()[(0, 0)].re - 0.875).abs() < 1e-15);
        assert!(a.mix(&b, 1.5).is_err());
    }
}
