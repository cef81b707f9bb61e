//! Cycle detection, triviality and equivalence tests, class tracking across
//! a filtration, and Betti numbers from sampled cycle representatives.

mod chain;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use chain::Chain;

use crate::complex::{validate_filtration, SimplicialComplex};
use crate::error::{Error, Result};
use crate::linalg::sub_seed;
use crate::operators::{boundary_or_zero, normalization_divisor};
use crate::spectra::{
    chebyshev_filter, exact_rank, mean_and_stderr, nullspace, probe_values, rescale, resolve_delta, stochastic_rank,
    to_rational, EstimatorParams, RankEstimate,
};

/// `∂_r c`, exactly. The boundary of a 0-chain is the empty chain.
pub fn boundary_of(k: &SimplicialComplex, c: &Chain) -> Result<Chain> {
    c.check_bound(k)?;
    if c.r() == 0 {
        return Ok(Chain::zero(0));
    }
    let d = boundary_or_zero(k, c.r());
    let mut terms = Vec::new();
    for (&j, a) in c.coeffs() {
        for &(i, v) in d.column(j) {
            terms.push((i, a * BigRational::from_integer(v.into())));
        }
    }
    Ok(Chain::new(c.r() - 1, terms))
}

pub fn is_cycle_exact(k: &SimplicialComplex, c: &Chain) -> Result<bool> {
    Ok(boundary_of(k, c)?.is_zero())
}

fn require_cycle(k: &SimplicialComplex, c: &Chain) -> Result<()> {
    if is_cycle_exact(k, c)? {
        Ok(())
    } else {
        Err(Error::NotACycle)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleVerdict {
    LikelyCycle,
    NotCycle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleDetection {
    pub verdict: CycleVerdict,
    /// Per-trial success probability `‖(∂ᵀ∂/((r+1)|S_r|)) ĉ‖²`.
    pub p: f64,
    pub trials: usize,
    /// Trial (0-based) at which the first success was observed.
    pub first_success: Option<usize>,
}

/// `‖(∂_rᵀ∂_r/((r+1)|S_r|)) c/‖c‖‖²`, evaluated in exact arithmetic and
/// rounded once at the end.
pub fn detection_probability(k: &SimplicialComplex, c: &Chain) -> Result<f64> {
    if c.is_zero() {
        return Err(Error::ZeroChain);
    }
    let image = boundary_of(k, c)?;
    if image.is_zero() {
        return Ok(0.0);
    }
    let d = boundary_or_zero(k, c.r());
    let mut terms = Vec::new();
    for (&i, a) in image.coeffs() {
        // row i of ∂ is column i of ∂ᵀ
        for (j, col) in d.columns().iter().enumerate() {
            if let Ok(pos) = col.binary_search_by_key(&i, |&(row, _)| row) {
                terms.push((j, a * BigRational::from_integer(col[pos].1.into())));
            }
        }
    }
    let lap_c = Chain::new(c.r(), terms);
    let scale = BigRational::from_integer(((c.r() + 1) * k.count(c.r())).into());
    let p = lap_c.norm_sq_exact() / (&scale * &scale * c.norm_sq_exact());
    Ok(p.to_f64().unwrap_or(f64::NAN))
}

/// Emulates `ceil(1/η)` ancilla measurements, each succeeding with the
/// probability above; any success certifies a non-cycle.
pub fn detect_cycle_stochastic(k: &SimplicialComplex, c: &Chain, eta: f64, seed: u64) -> Result<CycleDetection> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::BadParameter(format!("eta must lie in (0,1), got {eta}")));
    }
    let p = detection_probability(k, c)?;
    let trials = (1.0 / eta).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first_success = (0..trials).find(|_| rng.random::<f64>() < p);
    Ok(CycleDetection {
        verdict: if first_success.is_some() {
            CycleVerdict::NotCycle
        } else {
            CycleVerdict::LikelyCycle
        },
        p,
        trials,
        first_success,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum TestMode {
    Exact,
    Stochastic(EstimatorParams),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Stochastic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    High,
    Low,
}

/// Ranks behind an exact decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactRanks {
    pub boundary: usize,
    pub augmented: usize,
}

/// Estimated ranks of `∂∂ᵀ` and `∂∂ᵀ + ĉĉᵀ` from shared probes, and their
/// paired difference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StochasticComparison {
    pub boundary_rank: f64,
    pub augmented_rank: f64,
    pub rounded_boundary: i64,
    pub rounded_augmented: i64,
    /// Mean of per-probe `N (h_aug − h_bnd)`; estimates the rank increase,
    /// 0 or 1.
    pub difference: f64,
    pub difference_stderr: f64,
    pub delta: f64,
}

/// Answer of a triviality or equivalence test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub answer: bool,
    pub method: Method,
    pub confidence: Confidence,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactRanks>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stochastic: Option<StochasticComparison>,
}

fn augmented(d: &[Vec<BigRational>], c: &[BigRational]) -> Vec<Vec<BigRational>> {
    d.iter()
        .zip(c)
        .map(|(row, x)| {
            let mut row = row.clone();
            row.push(x.clone());
            row
        })
        .collect()
}

fn exact_trivial(k: &SimplicialComplex, c: &Chain) -> ExactRanks {
    let n = k.count(c.r());
    let d = to_rational(&boundary_or_zero(k, c.r() + 1));
    let boundary = exact_rank(&d);
    let augmented = exact_rank(&augmented(&d, &c.to_dense(n)));
    ExactRanks { boundary, augmented }
}

fn stochastic_trivial(k: &SimplicialComplex, c: &Chain, params: &EstimatorParams) -> Result<StochasticComparison> {
    let r = c.r();
    let n = k.count(r);
    let d = boundary_or_zero(k, r + 1).to_f64();
    let m1 = &d * d.transpose();
    // the column norm of ∂_{r+1} is √(r+2); giving ĉ the same length keeps
    // the new eigenvalue on the scale of the old ones
    let v = nalgebra::DVector::from_vec(c.to_f64(n));
    let v = &v * ((r as f64 + 2.0).sqrt() / v.norm());
    let m2 = &m1 + &v * v.transpose();
    // m2 ⪰ m1, so a bound for m2 covers both
    let (m2, bound) = rescale(&m2);
    let m1 = m1 / bound;
    let divisor = normalization_divisor(k, r);
    let delta = resolve_delta(params.delta, &m1, divisor).min(resolve_delta(params.delta, &m2, divisor));
    let filter = chebyshev_filter(delta, params.degree)?;
    let h1 = probe_values(&m1, &filter, params.probes, params.probe_kind, params.seed)?;
    let h2 = probe_values(&m2, &filter, params.probes, params.probe_kind, params.seed)?;
    let nf = n as f64;
    let diffs: Vec<f64> = h1.iter().zip(&h2).map(|(a, b)| nf * (b - a)).collect();
    let (difference, difference_stderr) = mean_and_stderr(&diffs);
    let boundary_rank = nf * mean_and_stderr(&h1).0;
    let augmented_rank = nf * mean_and_stderr(&h2).0;
    Ok(StochasticComparison {
        boundary_rank,
        augmented_rank,
        rounded_boundary: boundary_rank.round() as i64,
        rounded_augmented: augmented_rank.round() as i64,
        difference,
        difference_stderr,
        delta,
    })
}

/// Whether the cycle `c` bounds: `rank ∂_{r+1} = rank [∂_{r+1} | c]`.
pub fn test_trivial(k: &SimplicialComplex, c: &Chain, mode: &TestMode) -> Result<TestOutcome> {
    require_cycle(k, c)?;
    let method = match mode {
        TestMode::Exact => Method::Exact,
        TestMode::Stochastic(_) => Method::Stochastic,
    };
    if c.is_zero() {
        return Ok(TestOutcome {
            answer: true,
            method,
            confidence: Confidence::High,
            exact: None,
            stochastic: None,
        });
    }
    match mode {
        TestMode::Exact => {
            let ranks = exact_trivial(k, c);
            Ok(TestOutcome {
                answer: ranks.boundary == ranks.augmented,
                method,
                confidence: Confidence::High,
                exact: Some(ranks),
                stochastic: None,
            })
        }
        TestMode::Stochastic(params) => {
            let cmp = stochastic_trivial(k, c, params)?;
            let low = (cmp.difference - 0.5).abs() < 2.0 * cmp.difference_stderr;
            Ok(TestOutcome {
                answer: cmp.difference < 0.5,
                method,
                confidence: if low { Confidence::Low } else { Confidence::High },
                exact: None,
                stochastic: Some(cmp),
            })
        }
    }
}

/// Whether `c1 − c2` bounds. The difference is formed exactly.
pub fn test_equivalent(k: &SimplicialComplex, c1: &Chain, c2: &Chain, mode: &TestMode) -> Result<TestOutcome> {
    let diff = c1.sub(c2)?;
    require_cycle(k, c1)?;
    require_cycle(k, c2)?;
    test_trivial(k, &diff, mode)
}

fn with_seed(mode: &TestMode, seed: u64) -> TestMode {
    match mode {
        TestMode::Exact => TestMode::Exact,
        TestMode::Stochastic(p) => TestMode::Stochastic(EstimatorParams { seed, ..p.clone() }),
    }
}

fn mode_seed(mode: &TestMode) -> u64 {
    match mode {
        TestMode::Exact => 0,
        TestMode::Stochastic(p) => p.seed,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageFlag {
    pub stage: usize,
    /// Set when one cycle is tracked.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trivial: Option<bool>,
    /// Set when two cycles are tracked.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivalent: Option<bool>,
    pub method: Method,
    pub confidence: Confidence,
}

/// Per-stage behaviour of one class, or of a pair of classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub stages: Vec<StageFlag>,
}

/// Follows one cycle (triviality) or two (equivalence) through a filtration
/// `K_0 ⊆ K_1 ⊆ …`. The cycles are given on `K_0`.
pub fn track_classes(stages: &[SimplicialComplex], cycles: &[Chain], mode: &TestMode) -> Result<ClassReport> {
    if stages.is_empty() {
        return Err(Error::BadParameter("no stages given".into()));
    }
    if !(1..=2).contains(&cycles.len()) {
        return Err(Error::BadParameter(format!(
            "track one or two cycles, got {}",
            cycles.len()
        )));
    }
    for (i, pair) in stages.windows(2).enumerate() {
        validate_filtration(&pair[0], &pair[1]).map_err(|e| Error::NotAFiltrationChain(i, i + 1, Box::new(e)))?;
    }
    for c in cycles {
        require_cycle(&stages[0], c)?;
    }
    let master = mode_seed(mode);
    let flags = stages
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let here: Vec<Chain> = cycles
                .iter()
                .map(|c| c.transport(&stages[0], k))
                .collect::<Result<_>>()?;
            let m = with_seed(mode, sub_seed(master, i as u64));
            let out = match here.as_slice() {
                [c] => test_trivial(k, c, &m)?,
                [a, b] => test_equivalent(k, a, b, &m)?,
                _ => unreachable!(),
            };
            Ok(StageFlag {
                stage: i,
                trivial: (here.len() == 1).then_some(out.answer),
                equivalent: (here.len() == 2).then_some(out.answer),
                method: out.method,
                confidence: out.confidence,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ClassReport { stages: flags })
}

/// `s` random cycles `Σ a_i z_i` over an exact basis `z_i` of `ker ∂_r`, with
/// `a_i` uniform in `{−2,…,2}` and not all zero.
pub fn sample_cycles(k: &SimplicialComplex, r: usize, s: usize, seed: u64) -> Result<Vec<Chain>> {
    if s == 0 {
        return Err(Error::BadParameter("sample count must be >= 1".into()));
    }
    let n = k.require_layer(r)?;
    let basis = nullspace(&to_rational(&boundary_or_zero(k, r)), n);
    if basis.is_empty() {
        return Err(Error::TrivialKernel(r));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(s);
    while out.len() < s {
        let a: Vec<i64> = (0..basis.len()).map(|_| rng.random_range(-2..=2)).collect();
        if a.iter().all(|&x| x == 0) {
            continue;
        }
        let mut v = vec![BigRational::zero(); n];
        for (z, &ai) in basis.iter().zip(&a) {
            if ai != 0 {
                let ai = BigRational::from_integer(ai.into());
                for (vi, zi) in v.iter_mut().zip(z) {
                    *vi += &ai * zi;
                }
            }
        }
        out.push(Chain::from_dense(r, &v));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackingBetti {
    /// Exact mode: number of independent classes among the representatives,
    /// `rank [∂_{r+1} | 𝒞] − rank ∂_{r+1}`. Stochastic mode:
    /// `round(p · rank(𝒞ᵀ𝒞/‖𝒞‖²_F)/p)`.
    pub betti: usize,
    /// Representatives left after dropping trivial cycles and duplicates.
    pub representatives: usize,
    /// Plain linear rank of `𝒞` in chain space (exact mode).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_rank: Option<usize>,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<RankEstimate>,
}

/// Lower bound on `β_r` from sampled cycles: keep the first representative
/// of each class seen (trivial cycles are dropped), then take a rank.
pub fn betti_via_tracking(k: &SimplicialComplex, r: usize, cycles: &[Chain], mode: &TestMode) -> Result<TrackingBetti> {
    let n = k.require_layer(r)?;
    for c in cycles {
        if c.r() != r {
            return Err(Error::DimensionMismatch(format!(
                "expected {r}-cycles, got an {}-chain",
                c.r()
            )));
        }
        require_cycle(k, c)?;
    }
    let master = mode_seed(mode);
    let mut reps: Vec<Chain> = Vec::new();
    for (i, c) in cycles.iter().enumerate() {
        let base = sub_seed(master, i as u64);
        let trivial = test_trivial(k, c, &with_seed(mode, base))?.answer;
        if trivial {
            continue;
        }
        let seen = reps
            .par_iter()
            .enumerate()
            .map(|(j, rep)| {
                let m = with_seed(mode, sub_seed(base, j as u64 + 1));
                test_equivalent(k, c, rep, &m).map(|o| o.answer)
            })
            .collect::<Result<Vec<bool>>>()?;
        if !seen.contains(&true) {
            reps.push(c.clone());
        }
    }
    let p = reps.len();
    let method = match mode {
        TestMode::Exact => Method::Exact,
        TestMode::Stochastic(_) => Method::Stochastic,
    };
    if p == 0 {
        return Ok(TrackingBetti {
            betti: 0,
            representatives: 0,
            chain_rank: matches!(mode, TestMode::Exact).then_some(0),
            method,
            estimate: None,
        });
    }
    match mode {
        TestMode::Exact => {
            let cols: Vec<Vec<BigRational>> = reps.iter().map(|c| c.to_dense(n)).collect();
            let c_mat: Vec<Vec<BigRational>> = (0..n)
                .map(|i| cols.iter().map(|col| col[i].clone()).collect())
                .collect();
            let d = to_rational(&boundary_or_zero(k, r + 1));
            let joined: Vec<Vec<BigRational>> = d
                .iter()
                .zip(&c_mat)
                .map(|(a, b)| a.iter().chain(b).cloned().collect())
                .collect();
            let betti = exact_rank(&joined) - exact_rank(&d);
            Ok(TrackingBetti {
                betti,
                representatives: p,
                chain_rank: Some(exact_rank(&c_mat)),
                method,
                estimate: None,
            })
        }
        TestMode::Stochastic(params) => {
            let c_mat = DMatrix::from_fn(n, p, |i, j| reps[j].to_f64(n)[i]);
            let fro = c_mat.norm_squared();
            let gram = c_mat.transpose() * &c_mat / fro;
            let delta = resolve_delta(params.delta, &gram, p as f64);
            let filter = chebyshev_filter(delta, params.degree)?;
            let est = stochastic_rank(&gram, &filter, params.probes, params.probe_kind, params.seed)?;
            Ok(TrackingBetti {
                betti: (est.normalized * p as f64).round() as usize,
                representatives: p,
                chain_rank: None,
                method,
                estimate: Some(est),
            })
        }
    }
}
