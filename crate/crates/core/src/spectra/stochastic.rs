use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chebyshev::{ChebyshevStepFilter, SPECTRUM_UPPER};
use crate::error::{Error, Result};
use crate::linalg::power_iteration;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// Independent `±1/√N` entries.
    #[default]
    Rademacher,
    /// Columns of the `P x P` Sylvester–Hadamard matrix (`P` the next power
    /// of two), taken from a seeded permutation so that no column repeats
    /// before all `P` have been used.
    HadamardColumn,
}

impl std::str::FromStr for ProbeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rademacher" => Ok(ProbeKind::Rademacher),
            "hadamard" | "hadamard_column" | "hadamard-column" => Ok(ProbeKind::HadamardColumn),
            other => Err(Error::BadParameter(format!("unknown probe kind {other:?}"))),
        }
    }
}

/// Estimate of `rank(A)/N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankEstimate {
    /// Clamped to `[0, 1]`.
    pub normalized: f64,
    pub raw: f64,
    pub n_v: usize,
    pub m: usize,
    pub delta: f64,
    pub stderr: f64,
    pub probe_kind: ProbeKind,
}

impl RankEstimate {
    pub fn from_probe_values(values: &[f64], filter: &ChebyshevStepFilter, kind: ProbeKind) -> Self {
        let (mean, stderr) = mean_and_stderr(values);
        RankEstimate {
            normalized: mean.clamp(0.0, 1.0),
            raw: mean,
            n_v: values.len(),
            m: filter.degree,
            delta: filter.delta,
            stderr,
            probe_kind: kind,
        }
    }
}

/// Sample mean and `std / √n` (zero for fewer than two samples).
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Dimension probes live in: `N` itself, or the next power of two for
/// Hadamard columns.
pub fn padded_dim(n: usize, kind: ProbeKind) -> usize {
    match kind {
        ProbeKind::Rademacher => n,
        ProbeKind::HadamardColumn => n.next_power_of_two(),
    }
}

/// Probe vectors as the columns of a `padded_dim x n_v` matrix. Probe `l`
/// draws from its own ChaCha stream, so any subset can be regenerated
/// independently.
pub struct Probes {
    kind: ProbeKind,
    dim: usize,
    seed: u64,
    columns: Vec<usize>,
}

impl Probes {
    pub fn new(n: usize, n_v: usize, kind: ProbeKind, seed: u64) -> Self {
        let dim = padded_dim(n, kind);
        let columns = match kind {
            ProbeKind::Rademacher => Vec::new(),
            ProbeKind::HadamardColumn => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut order: Vec<usize> = (0..dim).collect();
                let mut out = Vec::with_capacity(n_v);
                while out.len() < n_v {
                    order.shuffle(&mut rng);
                    out.extend(order.iter().take(n_v - out.len()));
                }
                out
            }
        };
        Probes {
            kind,
            dim,
            seed,
            columns,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, l: usize) -> Vec<f64> {
        match self.kind {
            ProbeKind::Rademacher => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(l as u64 + 1);
                let s = 1.0 / (self.dim as f64).sqrt();
                (0..self.dim)
                    .map(|_| if rng.random::<bool>() { s } else { -s })
                    .collect()
            }
            ProbeKind::HadamardColumn => {
                let c = self.columns[l];
                let s = 1.0 / (self.dim as f64).sqrt();
                (0..self.dim)
                    .map(|i| if (i & c).count_ones().is_multiple_of(2) { s } else { -s })
                    .collect()
            }
        }
    }

    fn block(&self, range: std::ops::Range<usize>) -> DMatrix<f64> {
        let mut v = DMatrix::zeros(self.dim, range.len());
        for (k, l) in range.enumerate() {
            v.set_column(k, &nalgebra::DVector::from_vec(self.vector(l)));
        }
        v
    }
}

/// Probes are evaluated in fixed-size blocks; the partition does not depend
/// on the thread count, which keeps results bit-identical.
const PROBE_BLOCK: usize = 16;

/// Accepted slack on the power-iteration estimate of `‖A‖`.
pub const NORM_SLACK: f64 = 1e-6;

fn validate(a: &DMatrix<f64>, n_v: usize, seed: u64) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "expected a nonempty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if n_v == 0 {
        return Err(Error::BadParameter("need at least one probe".into()));
    }
    let bound = power_iteration(a, 30, seed);
    if bound > 1.0 + NORM_SLACK {
        return Err(Error::SpectralNormExceeded(bound));
    }
    Ok(())
}

/// `2A/U − I` on the padded space (the padding block maps to `−I`, the image
/// of eigenvalue 0).
fn mapped_operator(a: &DMatrix<f64>, dim: usize) -> DMatrix<f64> {
    let n = a.nrows();
    let mut b = DMatrix::from_diagonal_element(dim, dim, -1.0);
    let scale = 2.0 / SPECTRUM_UPPER;
    b.view_mut((0, 0), (n, n)).zip_apply(a, |x, y| *x += scale * y);
    b
}

fn column_dots(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    a.column_iter().zip(b.column_iter()).map(|(x, y)| x.dot(&y)).collect()
}

fn evaluate_blocks<F>(n_v: usize, per_block: F) -> Vec<f64>
where
    F: Fn(std::ops::Range<usize>) -> Vec<f64> + Sync,
{
    let starts: Vec<usize> = (0..n_v).step_by(PROBE_BLOCK).collect();
    starts
        .into_par_iter()
        .map(|s| per_block(s..(s + PROBE_BLOCK).min(n_v)))
        .collect::<Vec<_>>()
        .concat()
}

/// Per-probe estimates `(P/N) vᵀ h(A) v`, with `h(A) v` built by the
/// three-term Chebyshev recurrence.
pub fn probe_values(
    a: &DMatrix<f64>,
    filter: &ChebyshevStepFilter,
    n_v: usize,
    kind: ProbeKind,
    seed: u64,
) -> Result<Vec<f64>> {
    validate(a, n_v, seed)?;
    let n = a.nrows();
    let probes = Probes::new(n, n_v, kind, seed);
    let dim = probes.dim();
    let b = mapped_operator(a, dim);
    let scale = dim as f64 / n as f64;
    let c = &filter.coeffs;
    Ok(evaluate_blocks(n_v, |range| {
        let v = probes.block(range);
        let mut acc: Vec<f64> = column_dots(&v, &v).iter().map(|x| c[0] * x).collect();
        let mut prev = v.clone();
        let mut cur = &b * &v;
        for (j, &cj) in c.iter().enumerate().skip(1) {
            for (a, d) in acc.iter_mut().zip(column_dots(&v, &cur)) {
                *a += cj * d;
            }
            if j + 1 < c.len() {
                let next = (&b * &cur) * 2.0 - &prev;
                prev = std::mem::replace(&mut cur, next);
            }
        }
        acc.into_iter().map(|x| x * scale).collect()
    }))
}

pub fn stochastic_rank(
    a: &DMatrix<f64>,
    filter: &ChebyshevStepFilter,
    n_v: usize,
    kind: ProbeKind,
    seed: u64,
) -> Result<RankEstimate> {
    let values = probe_values(a, filter, n_v, kind, seed)?;
    Ok(RankEstimate::from_probe_values(&values, filter, kind))
}

/// Largest degree accepted by the power-moment path.
pub const MAX_MOMENT_DEGREE: usize = 30;

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficient of `x^{j−2i}` in `T_j(x)`:
/// `(−1)^i 2^{j−(2i+1)} C(2i,i) C(j,2i) / C(j−1,i)` for `j >= 1`.
pub fn chebyshev_power_coefficient(j: usize, i: usize) -> f64 {
    if j == 0 {
        return if i == 0 { 1.0 } else { 0.0 };
    }
    let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * 2f64.powi(j as i32 - (2 * i as i32 + 1)) * binomial(2 * i, i) * binomial(j, 2 * i) / binomial(j - 1, i)
}

/// Same estimand as [`probe_values`], with `vᵀ T_j(B) v` assembled from the
/// moments `μ_s = vᵀ Bˢ v` through the explicit power expansion of `T_j`.
pub fn power_moment_values(
    a: &DMatrix<f64>,
    filter: &ChebyshevStepFilter,
    n_v: usize,
    kind: ProbeKind,
    seed: u64,
) -> Result<Vec<f64>> {
    if filter.degree > MAX_MOMENT_DEGREE {
        return Err(Error::DegreeTooHigh(filter.degree));
    }
    validate(a, n_v, seed)?;
    let n = a.nrows();
    let m = filter.degree;
    let probes = Probes::new(n, n_v, kind, seed);
    let dim = probes.dim();
    let b = mapped_operator(a, dim);
    let scale = dim as f64 / n as f64;
    // weight[s] = Σ_j c_j · (coefficient of x^s in T_j)
    let mut weight = vec![0.0; m + 1];
    for (j, &cj) in filter.coeffs.iter().enumerate() {
        for i in 0..=j / 2 {
            weight[j - 2 * i] += cj * chebyshev_power_coefficient(j, i);
        }
    }
    Ok(evaluate_blocks(n_v, |range| {
        let v = probes.block(range);
        let mut w = v.clone();
        let mut acc: Vec<f64> = column_dots(&v, &w).iter().map(|x| weight[0] * x).collect();
        for &ws in &weight[1..] {
            w = &b * &w;
            for (a, mu) in acc.iter_mut().zip(column_dots(&v, &w)) {
                *a += ws * mu;
            }
        }
        acc.into_iter().map(|x| x * scale).collect()
    }))
}

pub fn power_moments_rank(
    a: &DMatrix<f64>,
    filter: &ChebyshevStepFilter,
    n_v: usize,
    kind: ProbeKind,
    seed: u64,
) -> Result<RankEstimate> {
    let values = power_moment_values(a, filter, n_v, kind, seed)?;
    Ok(RankEstimate::from_probe_values(&values, filter, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::chebyshev_filter;
    use nalgebra::DVector;

    fn diag(values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_vec(values.to_vec()))
    }

    fn half_rank() -> DMatrix<f64> {
        let mut v = vec![0.9; 8];
        v.extend([0.0; 8]);
        diag(&v)
    }

    #[test]
    fn full_rank_half_identity() {
        let f = chebyshev_filter(0.01, 64).unwrap();
        let a = DMatrix::identity(64, 64) * 0.5;
        for kind in [ProbeKind::Rademacher, ProbeKind::HadamardColumn] {
            let est = stochastic_rank(&a, &f, 50, kind, 3).unwrap();
            assert!((est.normalized - 1.0).abs() <= 0.05, "{est:?}");
        }
    }

    #[test]
    fn zero_matrix() {
        let f = chebyshev_filter(0.01, 64).unwrap();
        let est = stochastic_rank(&DMatrix::zeros(10, 10), &f, 20, ProbeKind::Rademacher, 1).unwrap();
        assert!(est.normalized <= 0.05);
        assert!(est.stderr < 1e-12);
    }

    #[test]
    fn half_rank_diagonal() {
        let f = chebyshev_filter(0.01, 64).unwrap();
        let est = stochastic_rank(&half_rank(), &f, 200, ProbeKind::Rademacher, 7).unwrap();
        assert!((est.normalized - 0.5).abs() <= 0.05, "{est:?}");
        assert_eq!(est.n_v, 200);
        assert_eq!(est.m, 64);
    }

    #[test]
    fn hadamard_cycle_is_exact_trace() {
        // a full sweep over the Hadamard columns sums to the trace exactly
        let f = chebyshev_filter(0.1, 64).unwrap();
        let est = stochastic_rank(&half_rank(), &f, 16, ProbeKind::HadamardColumn, 11).unwrap();
        let exact: f64 = (0..16).map(|i| f.eval(half_rank()[(i, i)])).sum::<f64>() / 16.0;
        assert!((est.raw - exact).abs() < 1e-10);
    }

    #[test]
    fn hadamard_pads_to_power_of_two() {
        let p = Probes::new(5, 3, ProbeKind::HadamardColumn, 0);
        assert_eq!(p.dim(), 8);
        let v = p.vector(0);
        assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        let f = chebyshev_filter(0.1, 32).unwrap();
        let est = stochastic_rank(&(DMatrix::identity(5, 5) * 0.7), &f, 64, ProbeKind::HadamardColumn, 2).unwrap();
        assert!((est.raw - 1.0).abs() < 0.02, "{est:?}");
    }

    #[test]
    fn rejects_large_norm() {
        let f = chebyshev_filter(0.1, 8).unwrap();
        let err = stochastic_rank(&(DMatrix::identity(4, 4) * 2.0), &f, 4, ProbeKind::Rademacher, 0);
        assert!(matches!(err, Err(Error::SpectralNormExceeded(_))));
    }

    #[test]
    fn deterministic_for_seed() {
        let f = chebyshev_filter(0.05, 32).unwrap();
        // a rank-one projector, so probes see different quadratic forms
        let u = DVector::from_fn(16, |i, _| (i as f64 + 1.0).sqrt());
        let a = &u * u.transpose() / u.norm_squared();
        let x = stochastic_rank(&a, &f, 40, ProbeKind::Rademacher, 9).unwrap();
        let y = stochastic_rank(&a, &f, 40, ProbeKind::Rademacher, 9).unwrap();
        assert_eq!(x, y);
        let z = stochastic_rank(&a, &f, 40, ProbeKind::Rademacher, 10).unwrap();
        assert_ne!(x.raw, z.raw);
    }

    #[test]
    fn power_expansion_reproduces_chebyshev() {
        for j in 0..=20usize {
            for &x in &[-1.0f64, -0.3, 0.0, 0.42, 1.0] {
                let p: f64 = (0..=j / 2)
                    .map(|i| chebyshev_power_coefficient(j, i) * x.powi((j - 2 * i) as i32))
                    .sum();
                let t = (j as f64 * f64::acos(x)).cos();
                assert!((p - t).abs() < 1e-9, "T_{j}({x})");
            }
        }
    }

    #[test]
    fn moments_agree_with_recurrence() {
        let a = half_rank();
        let f = chebyshev_filter(0.05, 16).unwrap();
        let x = probe_values(&a, &f, 50, ProbeKind::Rademacher, 5).unwrap();
        let y = power_moment_values(&a, &f, 50, ProbeKind::Rademacher, 5).unwrap();
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-8);
        }
        let a = DMatrix::identity(12, 12) * 0.5;
        let f = chebyshev_filter(0.05, 8).unwrap();
        let x = stochastic_rank(&a, &f, 30, ProbeKind::HadamardColumn, 1).unwrap();
        let y = power_moments_rank(&a, &f, 30, ProbeKind::HadamardColumn, 1).unwrap();
        assert!((x.raw - y.raw).abs() < 1e-8);
    }

    #[test]
    fn moments_degree_guard() {
        let f = chebyshev_filter(0.05, 31).unwrap();
        assert_eq!(
            power_moments_rank(&half_rank(), &f, 4, ProbeKind::Rademacher, 0),
            Err(Error::DegreeTooHigh(31))
        );
    }

    #[test]
    fn stderr_definition() {
        let (m, s) = mean_and_stderr(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - (2.0f64).sqrt() / 2f64.sqrt()).abs() < 1e-12);
    }
}
