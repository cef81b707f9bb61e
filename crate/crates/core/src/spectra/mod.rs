//! Exact rank and Betti oracles over the rationals, and the stochastic
//! Chebyshev rank estimator behind the normalized Betti estimates.

mod betti;
mod chebyshev;
mod exact;
mod stochastic;

pub use betti::*;
pub use chebyshev::*;
pub use exact::*;
pub use stochastic::*;
