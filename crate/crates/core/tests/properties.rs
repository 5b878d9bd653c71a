use e91_squash::hashing::{BitString, ToeplitzHash};
use e91_squash::operator::{eigh, Matrix, QuantumChannel};
use e91_squash::squash::ChoiMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn complex_matrix(dim: usize, re_im: &[f64]) -> Matrix {
    let mut m = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let k = 2 * (i * dim + j);
            m[(i, j)] = Complex64::new(re_im[k], re_im[k + 1]);
        }
    }
    m
}

fn hermitian(re_im: &[f64]) -> Matrix {
    complex_matrix(4, re_im).hermitian_part()
}

/// Kraus set `Kᵢ S^{-1/2}` with `S = Σ Kᵢ†Kᵢ`, trace preserving by
/// construction.
fn random_channel(dim: usize, raw: &[Vec<f64>]) -> QuantumChannel {
    let ks: Vec<Matrix> = raw.iter().map(|v| complex_matrix(dim, v)).collect();
    let mut s = Matrix::zeros(dim, dim);
    for k in &ks {
        s = &s + &(&k.adjoint() * k);
    }
    let eig = eigh(&s, 1e-9).unwrap();
    let mut inv_sqrt = Matrix::zeros(dim, dim);
    for (l, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        inv_sqrt = &inv_sqrt + &Matrix::outer(v, v).scale(1.0 / l.sqrt());
    }
    let kraus = ks.iter().map(|k| k * &inv_sqrt).collect();
    QuantumChannel::with_tolerance(dim, dim, kraus, 1e-8).unwrap()
}

fn entries(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 2 * dim * dim)
}

fn kraus_raw(dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    // an added identity keeps S well conditioned
    prop::collection::vec(entries(dim), 1..4).prop_map(move |mut v| {
        for i in 0..dim {
            v[0][2 * (i * dim + i)] += 2.0;
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn eigen_round_trip(e in entries(4)) {
        let m = hermitian(&e);
        let eig = eigh(&m, 1e-12).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&m) < 1e-10);
        prop_assert!(eig.orthonormality_defect() < 1e-10);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn channel_duality(raw in kraus_raw(4), r in entries(4), o in entries(4)) {
        let ch = random_channel(4, &raw);
        let a = complex_matrix(4, &r);
        let rho = &a * &a.adjoint();
        let obs = hermitian(&o);
        let lhs = ch.apply_matrix(&rho).trace_product(&obs);
        let rhs = rho.trace_product(&ch.adjoint_apply_matrix(&obs));
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn adjoint_is_unital(raw in kraus_raw(2)) {
        let ch = random_channel(2, &raw);
        let id = Matrix::identity(2);
        prop_assert!(ch.adjoint_apply_matrix(&id).max_abs_diff(&id) < 1e-10);
    }

    #[test]
    fn choi_adjoint_matches_kraus(raw in kraus_raw(2), o in entries(2)) {
        let ch = random_channel(2, &raw);
        let obs = complex_matrix(2, &o).hermitian_part();
        let choi = ChoiMatrix::from_channel(&ch);
        prop_assert!(choi.adjoint_apply(&obs).max_abs_diff(&ch.adjoint_apply_matrix(&obs)) < 1e-10);
        prop_assert!(choi.tp_residual() < 1e-10);
        prop_assert!(choi.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn hash_is_linear(seed in any::<u64>(), out in 1usize..100, a in any::<[u64; 4]>(), b in any::<[u64; 4]>()) {
        let bits = |w: [u64; 4]| BitString::from_bits((0..200).map(move |i| (w[i / 64] >> (i % 64)) & 1 == 1));
        let (x, y) = (bits(a), bits(b));
        let h = ToeplitzHash::from_seed(200, out, seed).unwrap();
        let lhs = h.hash(&x.xor(&y).unwrap()).unwrap();
        let rhs = h.hash(&x).unwrap().xor(&h.hash(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
