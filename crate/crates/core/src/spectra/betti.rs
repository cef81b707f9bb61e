use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::chebyshev::chebyshev_filter;
use super::exact::smallest_nonzero_eigenvalue;
use super::stochastic::{stochastic_rank, ProbeKind, RankEstimate};
use crate::complex::{FiltrationPair, SimplicialComplex};
use crate::error::Result;
use crate::linalg::{spectral_upper_bound, symmetric_eigenvalues};
use crate::operators::{normalized_laplacian, persistent_laplacian};

/// How the filter threshold is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaPolicy {
    /// Used as given, in units of the rescaled operator.
    Fixed(f64),
    /// 0.9 times the smallest nonzero eigenvalue of the rescaled operator,
    /// found by dense diagonalization.
    Oracle,
    /// `1/D` with `D` the normalization divisor, clamped to `[1e-4, 0.5]`.
    Normalization,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorParams {
    pub delta: DeltaPolicy,
    pub degree: usize,
    pub probes: usize,
    pub probe_kind: ProbeKind,
    pub seed: u64,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        EstimatorParams {
            delta: DeltaPolicy::Normalization,
            degree: 64,
            probes: 200,
            probe_kind: ProbeKind::Rademacher,
            seed: 0,
        }
    }
}

/// `A / b` for a guaranteed bound `b ≥ ‖A‖`, so the spectrum lands in
/// `[0, 1]`; the zero matrix is left alone with factor 1.
pub fn rescale(a: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let bound = spectral_upper_bound(a);
    if bound > 0.0 {
        (a / bound, bound)
    } else {
        (a.clone(), 1.0)
    }
}

const DELTA_FLOOR: f64 = 1e-4;
const DELTA_CEIL: f64 = 0.5;

pub fn resolve_delta(policy: DeltaPolicy, rescaled: &DMatrix<f64>, divisor: f64) -> f64 {
    match policy {
        DeltaPolicy::Fixed(d) => d,
        DeltaPolicy::Oracle => smallest_nonzero_eigenvalue(&symmetric_eigenvalues(rescaled), 1e-9)
            .map_or(DELTA_CEIL, |l| (0.9 * l).min(DELTA_CEIL)),
        DeltaPolicy::Normalization => (1.0 / divisor).clamp(DELTA_FLOOR, DELTA_CEIL),
    }
}

/// Result of a normalized (persistent) Betti estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BettiEstimate {
    /// `1 − rank/N`, clamped to `[0, 1]`.
    pub estimate: f64,
    /// Unclamped `1 − raw rank ratio`.
    pub raw: f64,
    pub stderr: f64,
    /// Number of `r`-simplices `N`.
    pub n: usize,
    /// The operator was divided by this before filtering.
    pub rescale: f64,
    pub delta: f64,
    /// Filter value at eigenvalue 0; large values mean the degree cannot
    /// resolve `delta`.
    pub filter_at_zero: f64,
    pub rank: RankEstimate,
}

impl BettiEstimate {
    /// `N · estimate`, the Betti number itself.
    pub fn betti(&self) -> f64 {
        self.estimate * self.n as f64
    }
}

/// Kernel fraction `1 − rank(A)/N` of a PSD matrix given in normalized units.
pub fn estimate_kernel_fraction(a: &DMatrix<f64>, divisor: f64, params: &EstimatorParams) -> Result<BettiEstimate> {
    let (rescaled, factor) = rescale(a);
    let delta = resolve_delta(params.delta, &rescaled, divisor);
    let filter = chebyshev_filter(delta, params.degree)?;
    let rank = stochastic_rank(&rescaled, &filter, params.probes, params.probe_kind, params.seed)?;
    Ok(BettiEstimate {
        estimate: 1.0 - rank.normalized,
        raw: 1.0 - rank.raw,
        stderr: rank.stderr,
        n: a.nrows(),
        rescale: factor,
        delta,
        filter_at_zero: filter.eval(0.0),
        rank,
    })
}

/// `β_r/|S_r|` through the stochastic rank of the normalized Laplacian.
pub fn estimate_normalized_betti(k: &SimplicialComplex, r: usize, params: &EstimatorParams) -> Result<BettiEstimate> {
    let a = normalized_laplacian(k, r)?;
    estimate_kernel_fraction(&a, crate::operators::normalization_divisor(k, r), params)
}

/// Divisor for the persistent Laplacian: the plain one with `|S_r|` from
/// `K1` and `|S_{r+1}|` from `K2`.
pub fn persistent_divisor(f: &FiltrationPair, r: usize) -> f64 {
    let sr = f.k1.count(r) as f64;
    let sr1 = f.k2.count(r + 1).max(1) as f64;
    2.0 * (r as f64 + 1.0) * (r as f64 + 2.0) * sr * sr1
}

pub fn estimate_normalized_persistent_betti(
    f: &FiltrationPair,
    r: usize,
    params: &EstimatorParams,
) -> Result<BettiEstimate> {
    let d = persistent_divisor(f, r);
    let a = persistent_laplacian(f, r)?.total / d;
    estimate_kernel_fraction(&a, d, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{complex_from_lists, generate, validate_filtration, GeneratorKind};

    fn gen(kind: GeneratorKind) -> SimplicialComplex {
        generate(&kind, None).unwrap()
    }

    fn oracle(seed: u64) -> EstimatorParams {
        EstimatorParams {
            delta: DeltaPolicy::Oracle,
            seed,
            ..EstimatorParams::default()
        }
    }

    #[test]
    fn betti_examples() {
        let cases = [
            (gen(GeneratorKind::HollowTriangle), 1.0 / 3.0),
            (gen(GeneratorKind::FilledTriangle), 0.0),
            (gen(GeneratorKind::Circle { m: 8 }), 1.0 / 8.0),
        ];
        for (k, want) in cases {
            let est = estimate_normalized_betti(&k, 1, &oracle(4)).unwrap();
            assert!((est.estimate - want).abs() <= 0.05, "{est:?} want {want}");
        }
    }

    #[test]
    fn persistent_examples() {
        let h = gen(GeneratorKind::HollowTriangle);
        let f = validate_filtration(&h, &gen(GeneratorKind::FilledTriangle)).unwrap();
        let est = estimate_normalized_persistent_betti(&f, 1, &oracle(1)).unwrap();
        assert!(est.estimate.abs() <= 0.05, "{est:?}");

        let f = validate_filtration(&h, &h).unwrap();
        let est = estimate_normalized_persistent_betti(&f, 1, &oracle(2)).unwrap();
        assert!((est.estimate - 1.0 / 3.0).abs() <= 0.05, "{est:?}");

        let k1 = complex_from_lists(&[&[0], &[1]], false).unwrap();
        let k2 = complex_from_lists(&[&[0, 1]], true).unwrap();
        let f = validate_filtration(&k1, &k2).unwrap();
        let est = estimate_normalized_persistent_betti(&f, 0, &oracle(3)).unwrap();
        assert!((est.estimate - 0.5).abs() <= 0.05, "{est:?}");
    }

    #[test]
    fn normalization_policy_on_circle() {
        let est =
            estimate_normalized_betti(&gen(GeneratorKind::Circle { m: 8 }), 1, &EstimatorParams::default()).unwrap();
        assert!((est.estimate - 0.125).abs() <= 0.05, "{est:?}");
        assert!(est.filter_at_zero.abs() < 0.05);
    }

    #[test]
    fn rescale_records_factor() {
        let a = DMatrix::identity(3, 3) * 4.0;
        let (b, factor) = rescale(&a);
        assert!((factor - 4.0).abs() < 1e-12);
        assert!((b[(0, 0)] - 1.0).abs() < 1e-12);
        let (z, factor) = rescale(&DMatrix::zeros(2, 2));
        assert_eq!(factor, 1.0);
        assert!(z.iter().all(|&x| x == 0.0));
    }
}
