use super::{HermitianOperator, Matrix, StateDensity, POST_TOL};
use crate::error::{Error, Result};

/// Trace-preserving completely positive map given by Kraus operators.
///
/// Each Kraus operator is `out_dim × in_dim`; completeness
/// Σ Kᵢ†Kᵢ = I is checked on construction.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<Matrix>,
}

impl QuantumChannel {
    pub fn new(in_dim: usize, out_dim: usize, kraus: Vec<Matrix>) -> Result<Self> {
        Self::with_tolerance(in_dim, out_dim, kraus, POST_TOL)
    }

    /// Like [`QuantumChannel::new`] with a caller-chosen completeness tolerance.
    pub fn with_tolerance(
        in_dim: usize,
        out_dim: usize,
        kraus: Vec<Matrix>,
        tol: f64,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::NotTracePreserving { residual: 1.0 });
        }
        for k in &kraus {
            if k.rows() != out_dim {
                return Err(Error::DimensionMismatch {
                    expected: out_dim,
                    found: k.rows(),
                });
            }
            if k.cols() != in_dim {
                return Err(Error::DimensionMismatch {
                    expected: in_dim,
                    found: k.cols(),
                });
            }
            if !k.is_finite() {
                return Err(Error::NonFinite("Kraus operator"));
            }
        }
        let ch = Self {
            in_dim,
            out_dim,
            kraus,
        };
        let residual = ch.completeness_residual();
        if residual > tol {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            in_dim: dim,
            out_dim: dim,
            kraus: vec![Matrix::identity(dim)],
        }
    }

    /// ρ ↦ UρU†. Fails if `u` is not unitary.
    pub fn unitary(u: Matrix) -> Result<Self> {
        let d = u.rows();
        Self::new(d, d, vec![u])
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[Matrix] {
        &self.kraus
    }

    /// max-entry norm of Σ Kᵢ†Kᵢ − I.
    pub fn completeness_residual(&self) -> f64 {
        let mut sum = Matrix::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        sum.max_abs_diff(&Matrix::identity(self.in_dim))
    }

    /// Σ Kᵢ ρ Kᵢ† on an arbitrary matrix.
    pub fn apply_matrix(&self, rho: &Matrix) -> Matrix {
        assert_eq!(rho.rows(), self.in_dim);
        let mut out = Matrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out = &out + &(&(k * rho) * &k.adjoint());
        }
        out
    }

    /// Σ Kᵢ† O Kᵢ on an arbitrary matrix.
    pub fn adjoint_apply_matrix(&self, obs: &Matrix) -> Matrix {
        assert_eq!(obs.rows(), self.out_dim);
        let mut out = Matrix::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            out = &out + &(&(&k.adjoint() * obs) * k);
        }
        out
    }

    pub fn apply(&self, rho: &StateDensity) -> Result<StateDensity> {
        if rho.dim() != self.in_dim {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim,
                found: rho.dim(),
            });
        }
        StateDensity::from_computed(self.apply_matrix(rho.matrix()))
    }

    /// Heisenberg-picture action F†(O).
    pub fn adjoint_apply(&self, obs: &HermitianOperator) -> Result<HermitianOperator> {
        if obs.dim() != self.out_dim {
            return Err(Error::DimensionMismatch {
                expected: self.out_dim,
                found: obs.dim(),
            });
        }
        HermitianOperator::with_tolerance(self.adjoint_apply_matrix(obs.matrix()), POST_TOL)
    }
}
