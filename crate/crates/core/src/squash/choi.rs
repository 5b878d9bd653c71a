use crate::error::{Error, Result};
use crate::operator::{eigh, Matrix, QuantumChannel, POST_TOL};

/// Choi matrix `J = Σᵢⱼ |i⟩⟨j| ⊗ F(|i⟩⟨j|)` of a map, input factor first.
///
/// Row and column index `(i, o)` is stored at `i · out_dim + o`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    in_dim: usize,
    out_dim: usize,
    matrix: Matrix,
}

impl ChoiMatrix {
    pub fn new(in_dim: usize, out_dim: usize, matrix: Matrix) -> Result<Self> {
        let d = in_dim * out_dim;
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.rows(),
            });
        }
        let deviation = matrix.hermiticity_defect();
        if deviation > POST_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            in_dim,
            out_dim,
            matrix: matrix.hermitian_part(),
        })
    }

    pub fn from_channel(ch: &QuantumChannel) -> Self {
        let (din, dout) = (ch.in_dim(), ch.out_dim());
        let d = din * dout;
        let mut j = Matrix::zeros(d, d);
        for k in ch.kraus() {
            for i in 0..din {
                for o in 0..dout {
                    let a = k[(o, i)];
                    for jj in 0..din {
                        for o2 in 0..dout {
                            j[(i * dout + o, jj * dout + o2)] += a * k[(o2, jj)].conj();
                        }
                    }
                }
            }
        }
        Self {
            in_dim: din,
            out_dim: dout,
            matrix: j.hermitian_part(),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Tr_out J; equals the identity exactly when the map is trace preserving.
    pub fn partial_trace_output(&self) -> Matrix {
        let mut m = Matrix::zeros(self.in_dim, self.in_dim);
        for i in 0..self.in_dim {
            for j in 0..self.in_dim {
                for o in 0..self.out_dim {
                    m[(i, j)] += self.matrix[(i * self.out_dim + o, j * self.out_dim + o)];
                }
            }
        }
        m
    }

    pub fn tp_residual(&self) -> f64 {
        self.partial_trace_output()
            .max_abs_diff(&Matrix::identity(self.in_dim))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigh(&self.matrix, POST_TOL)
            .expect("Choi matrix is Hermitian by construction")
            .min_eigenvalue()
    }

    /// Heisenberg action: `F†(O)ᵢⱼ = Tr[J (|i⟩⟨j| ⊗ O)]`.
    pub fn adjoint_apply(&self, obs: &Matrix) -> Matrix {
        assert_eq!(obs.rows(), self.out_dim);
        let dout = self.out_dim;
        let mut m = Matrix::zeros(self.in_dim, self.in_dim);
        for i in 0..self.in_dim {
            for j in 0..self.in_dim {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for o in 0..dout {
                    for o2 in 0..dout {
                        acc += obs[(o, o2)] * self.matrix[(j * dout + o2, i * dout + o)];
                    }
                }
                m[(i, j)] = acc;
            }
        }
        m
    }

    /// Kraus operators `Kₖ[o][i] = √λₖ vₖ[(i, o)]` from the eigensystem,
    /// dropping eigenvalues below `cutoff`.
    pub fn kraus_operators(&self, cutoff: f64) -> Vec<Matrix> {
        let es = eigh(&self.matrix, POST_TOL).expect("Hermitian by construction");
        let mut out = Vec::new();
        for (lambda, v) in es.eigenvalues.iter().zip(&es.eigenvectors) {
            if *lambda <= cutoff {
                continue;
            }
            let s = lambda.sqrt();
            let mut k = Matrix::zeros(self.out_dim, self.in_dim);
            for i in 0..self.in_dim {
                for o in 0..self.out_dim {
                    k[(o, i)] = v[i * self.out_dim + o] * s;
                }
            }
            out.push(k);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{pauli, Axis};

    #[test]
    fn identity_channel_choi_is_unnormalized_bell_projector() {
        let j = ChoiMatrix::from_channel(&QuantumChannel::identity(2));
        let m = j.matrix();
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((m[(r, c)].re - 1.0).abs() < 1e-15);
        }
        assert!(j.tp_residual() < 1e-15);
        assert!(j.min_eigenvalue().abs() < 1e-14);
    }

    #[test]
    fn adjoint_via_choi_matches_kraus() {
        let k0 = Matrix::identity(2).scale(0.7_f64.sqrt());
        let k1 = pauli(Axis::X).matrix().scale(0.3_f64.sqrt());
        let ch = QuantumChannel::new(2, 2, vec![k0, k1]).unwrap();
        let j = ChoiMatrix::from_channel(&ch);
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let o = pauli(axis);
            let via_choi = j.adjoint_apply(o.matrix());
            let via_kraus = ch.adjoint_apply_matrix(o.matrix());
            assert!(via_choi.max_abs_diff(&via_kraus) < 1e-14);
        }
    }

    #[test]
    fn kraus_round_trip() {
        let k0 = Matrix::identity(2).scale(0.6_f64.sqrt());
        let k1 = pauli(Axis::Z).matrix().scale(0.4_f64.sqrt());
        let ch = QuantumChannel::new(2, 2, vec![k0, k1]).unwrap();
        let j = ChoiMatrix::from_channel(&ch);
        let back = QuantumChannel::new(2, 2, j.kraus_operators(1e-14)).unwrap();
        assert!(
            ChoiMatrix::from_channel(&back)
                .matrix()
                .max_abs_diff(j.matrix())
                < 1e-13
        );
    }
}
