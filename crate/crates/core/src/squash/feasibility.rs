//! Does a qubit channel `F` exist with `F†(X) = Mx` and `F†(Z) = Mz`?
//!
//! The unknown is the 4×4 Choi matrix `J ⪰ 0`. Trace preservation
//! (`F†(I) = I`) and the two adjoint conditions are twelve real linear
//! constraints `Tr[G J] = b`. Dykstra's alternating projections run
//! between that affine set and the PSD cone. Intersections that consist
//! of low-rank points converge slowly, so every so often the current PSD
//! iterate is polished on its dominant eigenspace by a small least-squares
//! solve.

use num_complex::Complex64;
use serde::Serialize;

use super::ChoiMatrix;
use crate::error::{Error, Result};
use crate::operator::{eigen_clip, eigh, pauli, Axis, HermitianOperator, Matrix, POST_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Joint residual below which a PSD iterate counts as a witness.
    pub feasible_tol: f64,
    /// Gap between the sets that must persist to declare infeasibility.
    pub infeasible_floor: f64,
    pub stall_window: usize,
    /// Relative gap decrease over one window that counts as a stall.
    pub stall_rel: f64,
    pub polish_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            feasible_tol: 1e-7,
            infeasible_floor: 1e-4,
            stall_window: 500,
            stall_rel: 1e-6,
            polish_every: 100,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub status: FeasibilityStatus,
    /// Frobenius distance between the last affine and PSD iterates, or the
    /// witness residual when feasible.
    pub residual: f64,
    pub iterations: usize,
    #[serde(skip)]
    pub witness: Option<ChoiMatrix>,
    /// max |Tr[G J] − b| of the witness.
    pub linear_residual: Option<f64>,
    pub witness_min_eigenvalue: Option<f64>,
}

struct Constraint {
    g: Matrix,
    b: f64,
}

fn hs(a: &Matrix, b: &Matrix) -> f64 {
    a.trace_product(b).re
}

fn projector(i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(2, 2);
    m[(i, j)] = Complex64::new(1.0, 0.0);
    m
}

/// `Tr[J (|i⟩⟨j| ⊗ O)] = F†(O)ᵢⱼ`, split into real constraints.
fn constraints(targets: &[(Matrix, Matrix)]) -> Vec<Constraint> {
    let mut out = Vec::with_capacity(12);
    for (obs, target) in targets {
        for i in 0..2 {
            out.push(Constraint {
                g: projector(i, i).kron(obs),
                b: target[(i, i)].re,
            });
        }
        let b = projector(0, 1).kron(obs);
        let bd = b.adjoint();
        out.push(Constraint {
            g: (&b + &bd).scale(0.5),
            b: target[(0, 1)].re,
        });
        out.push(Constraint {
            g: (&b - &bd).scale_complex(Complex64::new(0.0, -0.5)),
            b: target[(0, 1)].im,
        });
    }
    out
}

/// Orthonormal rows with their right-hand sides; `Err(gap)` if the system
/// is inconsistent.
fn orthonormalize(cs: &[Constraint]) -> std::result::Result<Vec<Constraint>, f64> {
    let mut q: Vec<Constraint> = Vec::new();
    for c in cs {
        let scale = hs(&c.g, &c.g).sqrt();
        let mut g = c.g.clone();
        let mut b = c.b;
        for qk in &q {
            let coef = hs(&qk.g, &g);
            g = &g - &qk.g.scale(coef);
            b -= coef * qk.b;
        }
        let norm = hs(&g, &g).sqrt();
        if norm <= 1e-10 * scale {
            if b.abs() > 1e-9 {
                return Err(b.abs());
            }
            continue;
        }
        q.push(Constraint {
            g: g.scale(1.0 / norm),
            b: b / norm,
        });
    }
    Ok(q)
}

fn project_affine(j: &Matrix, q: &[Constraint]) -> Matrix {
    let mut out = j.clone();
    for c in q {
        let r = hs(&c.g, j) - c.b;
        out = &out - &c.g.scale(r);
    }
    out.hermitian_part()
}

fn linear_residual(j: &Matrix, cs: &[Constraint]) -> f64 {
    cs.iter()
        .map(|c| (hs(&c.g, j) - c.b).abs())
        .fold(0.0, f64::max)
}

fn frobenius(m: &Matrix) -> f64 {
    m.as_slice()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Hermitian r×r basis, orthonormal under the trace inner product.
fn hermitian_basis(r: usize) -> Vec<Matrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(r * r);
    for k in 0..r {
        let mut m = Matrix::zeros(r, r);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        out.push(m);
    }
    for j in 0..r {
        for k in (j + 1)..r {
            let mut m = Matrix::zeros(r, r);
            m[(j, k)] = Complex64::new(s, 0.0);
            m[(k, j)] = Complex64::new(s, 0.0);
            out.push(m);
            let mut m = Matrix::zeros(r, r);
            m[(j, k)] = Complex64::new(0.0, s);
            m[(k, j)] = Complex64::new(0.0, -s);
            out.push(m);
        }
    }
    out
}

/// Solves the normal equations by Cholesky; `None` if singular.
fn least_squares(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.first()?.len();
    let mut ata = vec![vec![0.0; n]; n];
    let mut atb = vec![0.0; n];
    for (row, &bi) in a.iter().zip(b) {
        for i in 0..n {
            atb[i] += row[i] * bi;
            for j in 0..n {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let diag_max = (0..n).map(|i| ata[i][i]).fold(0.0, f64::max);
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = ata[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 1e-12 * diag_max {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i][k] * y[k]).sum();
        y[i] = (atb[i] - s) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|k| l[k][i] * x[k]).sum();
        x[i] = (y[i] - s) / l[i][i];
    }
    Some(x)
}

/// Best `J = V W V†` on the span of the top-`r` eigenvectors of `y`.
fn polish(y: &Matrix, cs: &[Constraint], tol: f64) -> Option<Matrix> {
    let es = eigh(y, POST_TOL).ok()?;
    let dim = y.rows();
    for r in 1..dim {
        let v = &es.eigenvectors[..r];
        let basis = hermitian_basis(r);
        // lift each basis element: V H V†
        let lifted: Vec<Matrix> = basis
            .iter()
            .map(|h| {
                let mut m = Matrix::zeros(dim, dim);
                for a in 0..r {
                    for b in 0..r {
                        let hab = h[(a, b)];
                        if hab == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        m = &m + &Matrix::outer(&v[a], &v[b]).scale_complex(hab);
                    }
                }
                m
            })
            .collect();
        let rows: Vec<Vec<f64>> = cs
            .iter()
            .map(|c| lifted.iter().map(|l| hs(&c.g, l)).collect())
            .collect();
        let rhs: Vec<f64> = cs.iter().map(|c| c.b).collect();
        let Some(w) = least_squares(&rows, &rhs) else {
            continue;
        };
        let mut j = Matrix::zeros(dim, dim);
        for (wl, l) in w.iter().zip(&lifted) {
            j = &j + &l.scale(*wl);
        }
        let j = j.hermitian_part();
        if linear_residual(&j, cs) > tol {
            continue;
        }
        let min = eigh(&j, POST_TOL).ok()?.min_eigenvalue();
        if min >= -tol {
            return Some(j);
        }
    }
    None
}

/// Decides whether a qubit-to-qubit TPCP map realizes `(Mx, Mz)`.
pub fn onepartite_squash_feasibility(
    mx: &HermitianOperator,
    mz: &HermitianOperator,
) -> Result<FeasibilityReport> {
    onepartite_squash_feasibility_with(mx, mz, &SolverConfig::default())
}

pub fn onepartite_squash_feasibility_with(
    mx: &HermitianOperator,
    mz: &HermitianOperator,
    cfg: &SolverConfig,
) -> Result<FeasibilityReport> {
    for (name, m) in [("Mx", mx), ("Mz", mz)] {
        if m.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: m.dim(),
            });
        }
        let es = crate::operator::hermitian_eig(m);
        for lambda in [es.max_eigenvalue(), es.min_eigenvalue()] {
            if lambda.abs() > 1.0 + 1e-12 {
                return Err(Error::OutOfDomain {
                    name,
                    value: lambda,
                    domain: "spectrum within [-1, 1]",
                });
            }
        }
    }

    let targets = [
        (Matrix::identity(2), Matrix::identity(2)),
        (pauli(Axis::X).into_matrix(), mx.matrix().clone()),
        (pauli(Axis::Z).into_matrix(), mz.matrix().clone()),
    ];
    let cs = constraints(&targets);
    let q = match orthonormalize(&cs) {
        Ok(q) => q,
        Err(gap) => {
            return Ok(FeasibilityReport {
                status: FeasibilityStatus::Infeasible,
                residual: gap,
                iterations: 0,
                witness: None,
                linear_residual: None,
                witness_min_eigenvalue: None,
            })
        }
    };

    let found = |j: Matrix, it: usize| -> Result<FeasibilityReport> {
        let lin = linear_residual(&j, &cs);
        let witness = ChoiMatrix::new(2, 2, j)?;
        let min = witness.min_eigenvalue();
        Ok(FeasibilityReport {
            status: FeasibilityStatus::Feasible,
            residual: lin.max(-min).max(0.0),
            iterations: it,
            witness: Some(witness),
            linear_residual: Some(lin),
            witness_min_eigenvalue: Some(min),
        })
    };

    let mut x = project_affine(&Matrix::identity(4).scale(0.5), &q);
    let mut p = Matrix::zeros(4, 4);
    let mut gaps: Vec<f64> = Vec::with_capacity(cfg.max_iterations);
    for it in 1..=cfg.max_iterations {
        let y = eigen_clip(&(&x + &p));
        p = &(&x + &p) - &y;
        x = project_affine(&y, &q);
        let gap = frobenius(&(&x - &y));
        gaps.push(gap);

        if linear_residual(&y, &cs) <= cfg.feasible_tol {
            return found(y, it);
        }
        if cfg.polish_every > 0 && it % cfg.polish_every == 0 {
            if let Some(j) = polish(&y, &cs, cfg.feasible_tol) {
                return found(j, it);
            }
        }
        if it > cfg.stall_window && gap > cfg.infeasible_floor {
            let old = gaps[it - 1 - cfg.stall_window];
            if (old - gap) / old < cfg.stall_rel {
                return Ok(FeasibilityReport {
                    status: FeasibilityStatus::Infeasible,
                    residual: gap,
                    iterations: it,
                    witness: None,
                    linear_residual: None,
                    witness_min_eigenvalue: None,
                });
            }
        }
    }
    Ok(FeasibilityReport {
        status: FeasibilityStatus::Inconclusive,
        residual: gaps.last().copied().unwrap_or(f64::NAN),
        iterations: cfg.max_iterations,
        witness: None,
        linear_residual: None,
        witness_min_eigenvalue: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{generalized_x, Phase};

    fn check(alpha: Phase) -> FeasibilityReport {
        onepartite_squash_feasibility(&generalized_x(alpha), &pauli(Axis::Z)).unwrap()
    }

    #[test]
    fn identity_is_feasible() {
        let r = check(Phase::MINUS_I);
        assert_eq!(r.status, FeasibilityStatus::Feasible, "{r:?}");
        assert!(r.residual <= 1e-7);
        let w = r.witness.unwrap();
        assert!(
            w.adjoint_apply(pauli(Axis::X).matrix())
                .max_abs_diff(pauli(Axis::X).matrix())
                < 1e-6
        );
    }

    #[test]
    fn z_conjugation_is_feasible() {
        let r = check(Phase::I);
        assert_eq!(r.status, FeasibilityStatus::Feasible, "{r:?}");
    }

    #[test]
    fn tilted_axis_is_infeasible() {
        let r = check(Phase::from_angle(std::f64::consts::FRAC_PI_4));
        assert_eq!(r.status, FeasibilityStatus::Infeasible, "{r:?}");
        assert!(r.residual > 1e-4);
    }

    #[test]
    fn shrunk_observables_are_feasible() {
        // depolarizing by 1/2: F†(X) = X/2, F†(Z) = Z/2
        let mx = pauli(Axis::X).scale(0.5);
        let mz = pauli(Axis::Z).scale(0.5);
        let r = onepartite_squash_feasibility(&mx, &mz).unwrap();
        assert_eq!(r.status, FeasibilityStatus::Feasible, "{r:?}");
    }

    #[test]
    fn rejects_out_of_range_spectrum() {
        let mx = pauli(Axis::X).scale(2.0);
        assert!(onepartite_squash_feasibility(&mx, &pauli(Axis::Z)).is_err());
    }
}
