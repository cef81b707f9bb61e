use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper end of the spectral interval the filter is fitted on. Eigenvalues
/// in `[0, SPECTRUM_UPPER]` map to `[-1, 1]`, leaving headroom above 1 for a
/// power-iteration norm bound that came out slightly low.
pub const SPECTRUM_UPPER: f64 = 1.1;

/// Degree-`m` Chebyshev approximation of the spectral step `1{x > δ}`.
///
/// The target is a tanh ramp rising over `[δ/2, δ]`; it is projected onto
/// `T_j(2x/U - 1)` (`U = SPECTRUM_UPPER`) by a discrete cosine transform on
/// Chebyshev nodes, and the coefficients carry Jackson damping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevStepFilter {
    pub delta: f64,
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

fn smoothed_step(x: f64, delta: f64) -> f64 {
    let center = 0.75 * delta;
    let width = delta / 16.0;
    0.5 * (1.0 + ((x - center) / width).tanh())
}

/// Jackson kernel factors for `n = degree + 1` moments.
fn jackson(degree: usize) -> Vec<f64> {
    let n = (degree + 1) as f64;
    let a = std::f64::consts::PI / (n + 1.0);
    (0..=degree)
        .map(|j| {
            let j = j as f64;
            ((n - j + 1.0) * (a * j).cos() + (a * j).sin() / a.tan()) / (n + 1.0)
        })
        .collect()
}

/// Maps an eigenvalue in `[0, SPECTRUM_UPPER]` to the Chebyshev variable.
pub fn to_chebyshev_domain(x: f64) -> f64 {
    2.0 * x / SPECTRUM_UPPER - 1.0
}

pub fn chebyshev_filter(delta: f64, degree: usize) -> Result<ChebyshevStepFilter> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::BadParameter(format!("delta must lie in (0,1), got {delta}")));
    }
    if degree == 0 {
        return Err(Error::BadParameter("degree must be >= 1".into()));
    }
    let nodes = (8 * (degree + 1)).max(1024);
    let samples: Vec<(f64, f64)> = (0..nodes)
        .map(|k| {
            let theta = std::f64::consts::PI * (k as f64 + 0.5) / nodes as f64;
            let x = (theta.cos() + 1.0) * SPECTRUM_UPPER / 2.0;
            (theta, smoothed_step(x, delta))
        })
        .collect();
    let damp = jackson(degree);
    let coeffs = (0..=degree)
        .map(|j| {
            let s: f64 = samples.iter().map(|&(theta, f)| f * (j as f64 * theta).cos()).sum();
            let c = 2.0 * s / nodes as f64;
            let c = if j == 0 { c / 2.0 } else { c };
            c * damp[j]
        })
        .collect();
    Ok(ChebyshevStepFilter { delta, degree, coeffs })
}

impl ChebyshevStepFilter {
    /// Evaluates the polynomial at an eigenvalue `x` by the three-term
    /// recurrence.
    pub fn eval(&self, x: f64) -> f64 {
        let t = to_chebyshev_domain(x);
        let (mut prev, mut cur) = (1.0, t);
        let mut acc = self.coeffs[0];
        for &c in &self.coeffs[1..] {
            acc += c * cur;
            let next = 2.0 * t * cur - prev;
            prev = cur;
            cur = next;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_for_default_parameters() {
        let f = chebyshev_filter(0.01, 64).unwrap();
        assert!((f.eval(1.0) - 1.0).abs() <= 0.05, "h(1) = {}", f.eval(1.0));
        assert!(f.eval(0.0).abs() <= 0.05, "h(0) = {}", f.eval(0.0));
    }

    #[test]
    fn deterministic_coefficients() {
        assert_eq!(chebyshev_filter(0.2, 16).unwrap(), chebyshev_filter(0.2, 16).unwrap());
        assert_eq!(chebyshev_filter(0.2, 16).unwrap().coeffs.len(), 17);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(chebyshev_filter(0.1, 0).is_err());
        assert!(chebyshev_filter(0.0, 8).is_err());
        assert!(chebyshev_filter(1.0, 8).is_err());
    }

    #[test]
    fn step_shape_away_from_transition() {
        let f = chebyshev_filter(0.05, 64).unwrap();
        for x in [0.1, 0.3, 0.5, 0.9, 1.0, 1.05] {
            assert!((f.eval(x) - 1.0).abs() < 0.02, "h({x}) = {}", f.eval(x));
        }
        assert!(f.eval(0.0).abs() < 0.02);
    }
}
