//! Boundary and coboundary matrices, combinatorial Laplacians and the
//! persistent Laplacian of an inclusion.

mod persistent;
mod sparse;

use nalgebra::DMatrix;

pub use persistent::{
    persistent_blocks, persistent_laplacian, schur_complement, schur_up_laplacian, PersistentBlocks,
    PersistentLaplacian,
};
pub use sparse::{dense_to_matrix_market, SparseIntMatrix};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};

/// Signed boundary matrix `∂_r`, of shape `|S_{r-1}| x |S_r|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryMatrix {
    pub r: usize,
    pub matrix: SparseIntMatrix,
}

impl BoundaryMatrix {
    /// The coboundary `δ^{r-1} = ∂_rᵀ`.
    pub fn coboundary(&self) -> SparseIntMatrix {
        self.matrix.transpose()
    }
}

fn signed_columns(k: &SimplicialComplex, r: usize) -> Vec<Vec<(usize, i64)>> {
    k.layer(r)
        .iter()
        .map(|s| {
            s.faces()
                .map(|(pos, face)| {
                    let row = k.index_of(&face).expect("complex is closed");
                    (row, if pos % 2 == 0 { 1 } else { -1 })
                })
                .collect()
        })
        .collect()
}

/// `∂_r` for `r >= 1`; the face obtained by deleting the vertex at sorted
/// position `i` carries sign `(-1)^i`.
pub fn boundary_matrix(k: &SimplicialComplex, r: usize) -> Result<BoundaryMatrix> {
    if r == 0 {
        return Err(Error::BadParameter("boundary_matrix needs r >= 1".into()));
    }
    k.require_layer(r)?;
    k.require_layer(r - 1)?;
    Ok(BoundaryMatrix {
        r,
        matrix: SparseIntMatrix::from_columns(k.count(r - 1), signed_columns(k, r)),
    })
}

/// `∂_r` with the zero-map conventions: `∂_0 = 0` (shape `0 x |S_0|`) and an
/// empty layer `r` gives a `|S_{r-1}| x 0` matrix.
pub fn boundary_or_zero(k: &SimplicialComplex, r: usize) -> SparseIntMatrix {
    if r == 0 {
        return SparseIntMatrix::zeros(0, k.count(0));
    }
    SparseIntMatrix::from_columns(k.count(r - 1), signed_columns(k, r))
}

/// `Δ_r = ∂_{r+1} ∂_{r+1}ᵀ + ∂_rᵀ ∂_r`, exact.
pub fn laplacian(k: &SimplicialComplex, r: usize) -> Result<SparseIntMatrix> {
    k.require_layer(r)?;
    let up = boundary_or_zero(k, r + 1);
    let down = boundary_or_zero(k, r);
    Ok(up.matmul(&up.transpose()).add(&down.transpose().matmul(&down)))
}

/// `2 (r+1)(r+2) |S_r| |S_{r+1}|`, with `|S_{r+1}|` taken as 1 when that
/// layer is empty.
pub fn normalization_divisor(k: &SimplicialComplex, r: usize) -> f64 {
    let sr = k.count(r) as f64;
    let sr1 = k.count(r + 1).max(1) as f64;
    2.0 * (r as f64 + 1.0) * (r as f64 + 2.0) * sr * sr1
}

pub fn normalized_laplacian(k: &SimplicialComplex, r: usize) -> Result<DMatrix<f64>> {
    let lap = laplacian(k, r)?;
    Ok(lap.to_f64() / normalization_divisor(k, r))
}
