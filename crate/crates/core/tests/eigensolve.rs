use std::f64::consts::PI;

use fracspec::eigensolve::{
    eigh_hermitian, eigh_symmetric, eigh_tridiagonal, eigh_tridiagonal_lowest, HermitianMatrix,
    SymmetricMatrix,
};
use fracspec::suite::{random_hermitian, random_symmetric};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn two_by_two() {
    let m = SymmetricMatrix::from_row_major(2, &[2.0, -1.0, -1.0, 2.0]).unwrap();
    let ed = eigh_symmetric(&m).unwrap();
    assert!((ed.eigenvalues[0] - 1.0).abs() < 1e-14);
    assert!((ed.eigenvalues[1] - 3.0).abs() < 1e-14);
}

#[test]
fn identity_any_orthonormal_basis() {
    let ed = eigh_symmetric(&SymmetricMatrix::new(DMatrix::identity(3, 3)).unwrap()).unwrap();
    assert_eq!(ed.eigenvalues, vec![1.0, 1.0, 1.0]);
    assert!(ed.orthonormality_defect() < 1e-14);
}

#[test]
fn symmetrizes_on_construction() {
    let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
    let s = SymmetricMatrix::new(m).unwrap();
    assert_eq!(s.matrix()[(0, 1)], s.matrix()[(1, 0)]);
    assert!(SymmetricMatrix::new(DMatrix::zeros(2, 3)).is_err());
}

#[test]
fn random_five_reconstruction() {
    let m = random_symmetric(&mut rng(1), 5);
    let ed = eigh_symmetric(&m).unwrap();
    assert!(ed.reconstruction_residual(m.matrix()) < 1e-12);
    assert!(ed.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn tridiagonal_toeplitz() {
    let ed = eigh_tridiagonal(&[2.0, 2.0, 2.0], &[-1.0, -1.0]).unwrap();
    for (k, lam) in ed.eigenvalues.iter().enumerate() {
        let want = 2.0 - 2.0 * ((k + 1) as f64 * PI / 4.0).cos();
        assert!((lam - want).abs() < 1e-14);
    }
    let ed = eigh_tridiagonal(&[5.0, 5.0], &[0.0]).unwrap();
    assert_eq!(ed.eigenvalues, vec![5.0, 5.0]);
}

#[test]
fn tridiagonal_matches_dense() {
    let mut r = rng(2);
    let n = 50;
    let d: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
    let e: Vec<f64> = (0..n - 1).map(|_| r.random_range(-1.0..1.0)).collect();
    let dense = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            d[i]
        } else if i + 1 == j {
            e[i]
        } else if j + 1 == i {
            e[j]
        } else {
            0.0
        }
    });
    let a = eigh_tridiagonal(&d, &e).unwrap();
    let b = eigh_symmetric(&SymmetricMatrix::new(dense.clone()).unwrap()).unwrap();
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((x - y).abs() < 1e-10);
    }
    assert!(a.reconstruction_residual(&dense) < 1e-12);
}

#[test]
fn lowest_pairs_agree_with_full_solve() {
    let n = 300;
    let d: Vec<f64> = (0..n).map(|i| 2.0 + (i as f64 * 0.01).sin()).collect();
    let e = vec![-1.0; n - 1];
    let full = eigh_tridiagonal(&d, &e).unwrap();
    let low = eigh_tridiagonal_lowest(&d, &e, 8).unwrap();
    assert_eq!(low.eigenvalues.len(), 8);
    for k in 0..8 {
        assert!((low.eigenvalues[k] - full.eigenvalues[k]).abs() < 1e-12);
        let dot: f64 = low.vectors.column(k).dot(&full.vectors.column(k));
        assert!((dot.abs() - 1.0).abs() < 1e-9);
    }
    assert!(low.orthonormality_defect() < 1e-10);
}

#[test]
fn pauli_type() {
    let i = Complex64::i();
    let m = DMatrix::from_row_slice(2, 2, &[Complex64::new(0.0, 0.0), i, -i, Complex64::new(0.0, 0.0)]);
    let ed = eigh_hermitian(&HermitianMatrix::new(m).unwrap()).unwrap();
    assert!((ed.eigenvalues[0] + 1.0).abs() < 1e-14);
    assert!((ed.eigenvalues[1] - 1.0).abs() < 1e-14);
}

#[test]
fn hermitian_on_real_input() {
    let m = random_symmetric(&mut rng(3), 12);
    let real = eigh_symmetric(&m).unwrap();
    let cm = m.matrix().map(|x| Complex64::new(x, 0.0));
    let herm = eigh_hermitian(&HermitianMatrix::new(cm).unwrap()).unwrap();
    for (a, b) in real.eigenvalues.iter().zip(&herm.eigenvalues) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn random_six_hermitian() {
    let m = random_hermitian(&mut rng(4), 6);
    let ed = eigh_hermitian(&m).unwrap();
    assert!(ed.reconstruction_residual(m.matrix()) < 1e-12);
    assert!(ed.orthonormality_defect() < 1e-12);
}

#[test]
fn trace_preserved() {
    for seed in 0..5 {
        let m = random_symmetric(&mut rng(10 + seed), 40);
        let ed = eigh_symmetric(&m).unwrap();
        let tr = m.matrix().trace();
        let sum: f64 = ed.eigenvalues.iter().sum();
        assert!((sum - tr).abs() <= 1e-9 * tr.abs().max(1.0));
        let h = random_hermitian(&mut rng(20 + seed), 30);
        let ed = eigh_hermitian(&h).unwrap();
        let tr = h.matrix().trace().re;
        let sum: f64 = ed.eigenvalues.iter().sum();
        assert!((sum - tr).abs() <= 1e-9 * tr.abs().max(1.0));
    }
}

#[test]
fn rank_one_bump_raises_every_eigenvalue() {
    let mut r = rng(5);
    for _ in 0..20 {
        let m = random_symmetric(&mut r, 15);
        let i = r.random_range(0..15);
        let c: f64 = r.random_range(0.01..3.0);
        let mut bumped = m.matrix().clone();
        bumped[(i, i)] += c;
        let a = eigh_symmetric(&m).unwrap().eigenvalues;
        let b = eigh_symmetric(&SymmetricMatrix::new(bumped).unwrap()).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            assert!(x <= &(y + 1e-12));
        }
    }
}

#[test]
fn degenerate_spectrum_projector() {
    // diag(1, 1, 3) in a rotated basis: only the eigenspace projector is well defined
    let q = nalgebra::Rotation3::from_euler_angles(0.3, -0.7, 1.1).into_inner();
    let q = DMatrix::from_fn(3, 3, |i, j| q[(i, j)]);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 3.0]));
    let m = &q * d * q.transpose();
    let ed = eigh_symmetric(&SymmetricMatrix::new(m).unwrap()).unwrap();
    let v = ed.vectors.columns(0, 2);
    let p = &v * v.transpose();
    let want = q.columns(0, 2) * q.columns(0, 2).transpose();
    assert!((p - want).amax() < 1e-12);
}

#[test]
fn bit_identical_reruns() {
    let m = random_symmetric(&mut rng(6), 60);
    let a = eigh_symmetric(&m).unwrap();
    let b = eigh_symmetric(&m).unwrap();
    assert_eq!(a.eigenvalues, b.eigenvalues);
    assert_eq!(a.vectors, b.vectors);
}

#[test]
fn contract_at_size_limits() {
    let m = random_symmetric(&mut rng(7), 400);
    let ed = eigh_symmetric(&m).unwrap();
    assert!(ed.orthonormality_defect() < 1e-10);
    assert!(ed.reconstruction_residual(m.matrix()) < 1e-10);
    let h = random_hermitian(&mut rng(8), 200);
    let ed = eigh_hermitian(&h).unwrap();
    assert!(ed.orthonormality_defect() < 1e-10);
    assert!(ed.reconstruction_residual(h.matrix()) < 1e-10);
}
