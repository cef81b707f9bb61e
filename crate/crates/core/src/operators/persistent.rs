use nalgebra::DMatrix;

use super::{boundary_or_zero, SparseIntMatrix};
use crate::complex::FiltrationPair;
use crate::error::{Error, Result};
use crate::linalg::{pseudo_inverse, PINV_RTOL};

/// Blocks of `∂_{r+1}^{K2}` under the prefix ordering:
///
/// ```text
/// ∂_{r+1}^{K2} = [ B  R ]
///                [ 0  G ]
/// ```
///
/// `B` is `∂_{r+1}^{K1}`, `R` holds the old `r`-faces of new
/// `(r+1)`-simplices and `G` their new `r`-faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersistentBlocks {
    pub r: usize,
    pub b: SparseIntMatrix,
    pub red: SparseIntMatrix,
    pub g: SparseIntMatrix,
}

impl PersistentBlocks {
    /// Reassembles `[B R; 0 G]`.
    pub fn assemble(&self) -> SparseIntMatrix {
        let zero = SparseIntMatrix::zeros(self.g.rows(), self.b.cols());
        self.b.vstack(&zero).hstack(&self.red.vstack(&self.g))
    }
}

pub fn persistent_blocks(f: &FiltrationPair, r: usize) -> Result<PersistentBlocks> {
    f.k2.require_layer(r)?;
    let full = boundary_or_zero(&f.k2, r + 1);
    let old_rows = f.k1.count(r);
    let old_cols = f.k1.count(r + 1);
    let all_rows = full.rows();
    let all_cols = full.cols();

    let below = full.block(old_rows..all_rows, 0..old_cols);
    if !below.is_zero() {
        return Err(Error::StructuralViolation(format!(
            "an (r+1)-simplex of K1 has a face outside K1 (r = {r})"
        )));
    }
    let b = full.block(0..old_rows, 0..old_cols);
    if b != boundary_or_zero(&f.k1, r + 1) {
        return Err(Error::StructuralViolation(format!(
            "top-left block differs from the K1 boundary (r = {r})"
        )));
    }
    Ok(PersistentBlocks {
        r,
        b,
        red: full.block(0..old_rows, old_cols..all_cols),
        g: full.block(old_rows..all_rows, old_cols..all_cols),
    })
}

/// Schur complement `M/M(I,I) = M(Ī,Ī) − M(Ī,I) M(I,I)⁺ M(I,Ī)` with a
/// pseudoinverse cut at `tol * sigma_max`. `Ī` keeps the original order.
pub fn schur_complement(m: &DMatrix<f64>, idx: &[usize], tol: f64) -> DMatrix<f64> {
    let n = m.nrows();
    let mut in_i = vec![false; n];
    for &i in idx {
        in_i[i] = true;
    }
    let keep: Vec<usize> = (0..n).filter(|&i| !in_i[i]).collect();
    let sub = |rows: &[usize], cols: &[usize]| DMatrix::from_fn(rows.len(), cols.len(), |a, b| m[(rows[a], cols[b])]);
    let m_kk = sub(&keep, &keep);
    if idx.is_empty() {
        return m_kk;
    }
    let m_ki = sub(&keep, idx);
    let m_ii = sub(idx, idx);
    let m_ik = sub(idx, &keep);
    m_kk - &m_ki * pseudo_inverse(&m_ii, tol) * m_ik
}

/// The persistent Laplacian `Δ_r^{K1,K2}` and its two summands.
#[derive(Clone, Debug)]
pub struct PersistentLaplacian {
    /// `∂^{K1,K2}_{r+1} (∂^{K1,K2}_{r+1})ᵀ = BBᵀ + RRᵀ − RGᵀ(GGᵀ)⁺GRᵀ`.
    pub up: DMatrix<f64>,
    /// `(∂_r^{K1})ᵀ ∂_r^{K1}`.
    pub down: DMatrix<f64>,
    pub total: DMatrix<f64>,
}

pub fn persistent_laplacian(f: &FiltrationPair, r: usize) -> Result<PersistentLaplacian> {
    f.k1.require_layer(r)?;
    let blocks = persistent_blocks(f, r)?;
    let b = blocks.b.to_f64();
    let red = blocks.red.to_f64();
    let g = blocks.g.to_f64();
    let mut up = &b * b.transpose() + &red * red.transpose();
    if g.nrows() > 0 && g.ncols() > 0 {
        let ggt_pinv = pseudo_inverse(&(&g * g.transpose()), PINV_RTOL);
        up -= &red * g.transpose() * ggt_pinv * &g * red.transpose();
    }
    // symmetrize away rounding asymmetry from the correction term
    up = (&up + up.transpose()) * 0.5;
    let d = boundary_or_zero(&f.k1, r).to_f64();
    let down = d.transpose() * &d;
    let total = &up + &down;
    Ok(PersistentLaplacian { up, down, total })
}

/// The up-part computed the other way: as the Schur complement of
/// `∂_{r+1}^{K2} ∂_{r+1}^{K2,ᵀ}` on the indices of new `r`-simplices.
pub fn schur_up_laplacian(f: &FiltrationPair, r: usize) -> Result<DMatrix<f64>> {
    f.k2.require_layer(r)?;
    let d = boundary_or_zero(&f.k2, r + 1).to_f64();
    let full = &d * d.transpose();
    let idx: Vec<usize> = f.new_indices(r).collect();
    Ok(schur_complement(&full, &idx, PINV_RTOL))
}
