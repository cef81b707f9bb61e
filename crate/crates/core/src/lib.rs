//! Simplicial homology toolkit: Betti and persistent Betti numbers through
//! (persistent) combinatorial Laplacians, a Chebyshev/Hutchinson stochastic
//! rank estimator with exact rational oracles, homology triviality and
//! equivalence tests, cycle detection, class tracking across filtrations and
//! cocycle-based equivalence testing.

pub mod cohomology;
pub mod complex;
pub mod error;
pub mod homology;
pub mod linalg;
pub mod operators;
pub mod spectra;

pub use error::{Error, Result};
