//! Dense floating-point helpers shared by the persistent-Laplacian,
//! estimator and cocycle code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Relative singular-value cutoff used for every pseudoinverse.
pub const PINV_RTOL: f64 = 1e-10;

/// Moore–Penrose pseudoinverse of a symmetric matrix; eigenvalues with
/// `|λ| <= rtol * max|λ|` are treated as zero.
///
/// Built on the symmetric eigendecomposition rather than the SVD, which is
/// unreliable on rank-deficient integer matrices.
pub fn pseudo_inverse(m: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    if m.nrows() == 0 {
        return DMatrix::zeros(0, 0);
    }
    let eig = SymmetricEigen::new(m.clone());
    let cut = rtol * eig.eigenvalues.amax();
    let mut out = DMatrix::zeros(m.nrows(), m.nrows());
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l.abs() > cut && l != 0.0 {
            let v = eig.eigenvectors.column(k);
            out += (v / l) * v.transpose();
        }
    }
    out
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Number of eigenvalues of a symmetric PSD matrix at or below `abs_tol`.
pub fn kernel_dim(m: &DMatrix<f64>, abs_tol: f64) -> usize {
    symmetric_eigenvalues(m).iter().filter(|&&l| l <= abs_tol).count()
}

/// Seed for the `index`-th independent sub-task of a run seeded with
/// `master`.
pub fn sub_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index.wrapping_add(1));
    rng.next_u64()
}

/// Upper bound on the spectral norm of a symmetric matrix: the smaller of
/// the largest absolute row sum and the Frobenius norm.
pub fn spectral_upper_bound(m: &DMatrix<f64>) -> f64 {
    let row_sum = m.row_iter().map(|r| r.abs().sum()).fold(0.0, f64::max);
    row_sum.min(m.norm())
}

/// Rayleigh-quotient estimate of the largest eigenvalue of a symmetric PSD
/// matrix after `iters` power iterations from a seeded Gaussian start.
pub fn power_iteration(m: &DMatrix<f64>, iters: usize, seed: u64) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
    let mut norm = v.norm();
    if norm == 0.0 {
        return 0.0;
    }
    v /= norm;
    for _ in 0..iters {
        let w = m * &v;
        norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        v = w / norm;
    }
    v.dot(&(m * &v))
}
