//! Cochains, cocycle construction and the cohomological test for
//! homologous cycles.

use nalgebra::DVector;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::homology::{is_cycle_exact, Chain};
use crate::linalg::{pseudo_inverse, sub_seed, PINV_RTOL};
use crate::operators::{boundary_or_zero, SparseIntMatrix};
use crate::spectra::exact_rank_int;

/// A real `r`-cochain, one value per `r`-simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cochain {
    pub r: usize,
    pub values: Vec<f64>,
    /// Set by the constructors that guarantee `δω ≈ 0`.
    pub cocycle: bool,
    /// The random draw was almost entirely a coboundary direction.
    #[serde(default)]
    pub degenerate: bool,
}

impl Cochain {
    pub fn new(r: usize, values: Vec<f64>) -> Self {
        Cochain {
            r,
            values,
            cocycle: false,
            degenerate: false,
        }
    }

    /// The dual basis functional `e_i` on `n` simplices.
    pub fn basis(r: usize, n: usize, i: usize) -> Self {
        let mut values = vec![0.0; n];
        values[i] = 1.0;
        Cochain::new(r, values)
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// `δ^r = ∂_{r+1}ᵀ`, shape `|S_{r+1}| x |S_r|`.
pub fn coboundary_matrix(k: &SimplicialComplex, r: usize) -> SparseIntMatrix {
    boundary_or_zero(k, r + 1).transpose()
}

/// `δ^r ω` as a dense vector over the `(r+1)`-simplices.
pub fn coboundary(k: &SimplicialComplex, w: &Cochain) -> Vec<f64> {
    coboundary_matrix(k, w.r).mul_vec(&w.values)
}

fn check_len(k: &SimplicialComplex, w: &Cochain) -> Result<usize> {
    let n = k.count(w.r);
    if w.values.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "cochain has {} values, layer {} has {n} simplices",
            w.values.len(),
            w.r
        )));
    }
    Ok(n)
}

/// `ω(c) = Σ ω_i c_i`.
pub fn evaluate(k: &SimplicialComplex, w: &Cochain, c: &Chain) -> Result<f64> {
    if w.r != c.r() {
        return Err(Error::DimensionMismatch(format!(
            "{}-cochain against {}-chain",
            w.r,
            c.r()
        )));
    }
    check_len(k, w)?;
    c.check_bound(k)?;
    Ok(c.coeffs()
        .iter()
        .map(|(&i, a)| w.values[i] * a.to_f64().unwrap_or(f64::NAN))
        .sum())
}

/// Orthogonal projection onto `ker δ^r`:
/// `ω − δᵀ (δ δᵀ)⁺ δ ω`, the pseudoinverse cut at `tol · λ_max`.
pub fn project_to_cocycle(k: &SimplicialComplex, r: usize, w: &Cochain, tol: f64) -> Result<Cochain> {
    k.require_layer(r)?;
    if w.r != r {
        return Err(Error::DimensionMismatch(format!("expected an {r}-cochain")));
    }
    check_len(k, w)?;
    let mut out = w.clone();
    out.cocycle = true;
    if k.count(r + 1) == 0 {
        return Ok(out);
    }
    let d = coboundary_matrix(k, r).to_f64();
    let x = DVector::from_column_slice(&w.values);
    let dx = &d * &x;
    let correction = d.transpose() * (pseudo_inverse(&(&d * d.transpose()), tol) * dx);
    out.values = (x - correction).iter().copied().collect();
    Ok(out)
}

/// Projected norm below which a random cocycle is flagged degenerate.
pub const DEGENERATE_NORM: f64 = 1e-6;

/// Unit Gaussian cochain projected onto `ker δ^r` and renormalized.
pub fn random_cocycle(k: &SimplicialComplex, r: usize, seed: u64) -> Result<Cochain> {
    let n = k.require_layer(r)?;
    if k.count(r + 1) > 0 && exact_rank_int(&coboundary_matrix(k, r)) >= n {
        return Err(Error::TrivialCocycleSpace(r));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    let w = Cochain::new(r, raw.iter().map(|x| x / norm).collect());
    let mut p = project_to_cocycle(k, r, &w, PINV_RTOL)?;
    let pn = p.norm();
    if pn < DEGENERATE_NORM {
        p.degenerate = true;
    } else {
        p.values.iter_mut().for_each(|x| *x /= pn);
    }
    Ok(p)
}

fn to_cochain(r: usize, values: &[BigRational]) -> Cochain {
    Cochain {
        r,
        values: values.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
        cocycle: true,
        degenerate: false,
    }
}

/// First `(r+1)`-simplex whose constraint `ω(∂σ) = 0` fails, if any.
fn first_violation(d: &SparseIntMatrix, w: &[BigRational]) -> Option<usize> {
    (0..d.cols()).find(|&j| {
        let s: BigRational = d
            .column(j)
            .iter()
            .map(|&(i, v)| &w[i] * BigRational::from_integer(v.into()))
            .sum();
        !s.is_zero()
    })
}

/// Greedy sweep over the `(r+1)`-simplices in index order: free faces get
/// random integers in `[−10, 10]` except the last, which is solved from
/// `ω(∂σ) = 0`; a simplex with every face already fixed is checked instead.
/// Untouched `r`-simplices get 0. Exact rational arithmetic throughout.
pub fn manual_cocycle(k: &SimplicialComplex, r: usize, seed: u64) -> Result<Cochain> {
    let n = k.require_layer(r)?;
    k.require_layer(r + 1)?;
    let d = boundary_or_zero(k, r + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w: Vec<Option<BigRational>> = vec![None; n];
    for j in 0..d.cols() {
        let col = d.column(j);
        let free: Vec<(usize, i64)> = col.iter().copied().filter(|&(i, _)| w[i].is_none()).collect();
        if let Some((&(last, sign), rest)) = free.split_last() {
            for &(i, _) in rest {
                w[i] = Some(BigRational::from_integer(rng.random_range(-10i64..=10).into()));
            }
            let partial: BigRational = col
                .iter()
                .filter(|&&(i, _)| i != last)
                .map(|&(i, v)| w[i].clone().expect("assigned") * BigRational::from_integer(v.into()))
                .sum();
            w[last] = Some(-partial / BigRational::from_integer(sign.into()));
        } else {
            let total: BigRational = col
                .iter()
                .map(|&(i, v)| w[i].clone().expect("assigned") * BigRational::from_integer(v.into()))
                .sum();
            if !total.is_zero() {
                return Err(Error::ConstructionFailed(k.layer(r + 1)[j].clone()));
            }
        }
    }
    let w: Vec<BigRational> = w.into_iter().map(|x| x.unwrap_or_else(BigRational::zero)).collect();
    if let Some(j) = first_violation(&d, &w) {
        return Err(Error::ConstructionFailed(k.layer(r + 1)[j].clone()));
    }
    Ok(to_cochain(r, &w))
}

/// Looks for two `r`-simplices `p < q` that are each a face of exactly one
/// `(r+1)`-simplex, the same one. Equal signs give `ω_p = 1, ω_q = −1`,
/// opposite signs `ω_p = ω_q = 1`; every other value is 0.
pub fn pair_cocycle(k: &SimplicialComplex, r: usize) -> Result<Cochain> {
    let n = k.require_layer(r)?;
    k.require_layer(r + 1)?;
    let d = boundary_or_zero(k, r + 1);
    let rows = d.transpose();
    // column -> rows whose only nonzero sits in that column
    let mut lonely: std::collections::BTreeMap<usize, Vec<(usize, i64)>> = Default::default();
    for i in 0..n {
        if let [(col, v)] = rows.column(i) {
            lonely.entry(*col).or_default().push((i, *v));
        }
    }
    let (&(p, dp), &(q, dq)) = lonely
        .values()
        .find_map(|rs| (rs.len() >= 2).then(|| (&rs[0], &rs[1])))
        .ok_or(Error::NotFound(r))?;
    let one = BigRational::from_integer(1.into());
    let mut w = vec![BigRational::zero(); n];
    w[p] = one.clone();
    w[q] = if dp == dq { -one } else { one };
    if let Some(j) = first_violation(&d, &w) {
        return Err(Error::ConstructionFailed(k.layer(r + 1)[j].clone()));
    }
    Ok(to_cochain(r, &w))
}

pub const DEFAULT_WITNESSES: usize = 8;
pub const DEFAULT_TOL: f64 = 1e-8;

/// A cocycle taking different values on the two cycles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub index: usize,
    pub difference: f64,
    pub cochain: Cochain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohomologyOutcome {
    pub equivalent: bool,
    /// Witnesses drawn (0 when the cocycle space is trivial).
    pub witnesses: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinguishing: Option<Witness>,
}

/// Draws `count` random cocycles (witness `i` seeded by `sub_seed(seed, i)`)
/// and reports the first one separating `c1` from `c2` by more than
/// `tol · (1 + ‖c1‖ + ‖c2‖)`.
pub fn test_equivalent_cohomological(
    k: &SimplicialComplex,
    c1: &Chain,
    c2: &Chain,
    count: usize,
    tol: f64,
    seed: u64,
) -> Result<CohomologyOutcome> {
    if c1.r() != c2.r() {
        return Err(Error::DimensionMismatch(format!(
            "chains of dimension {} and {}",
            c1.r(),
            c2.r()
        )));
    }
    for c in [c1, c2] {
        if !is_cycle_exact(k, c)? {
            return Err(Error::NotACycle);
        }
    }
    let r = c1.r();
    let scale = tol * (1.0 + c1.norm() + c2.norm());
    let draws: Vec<Result<Cochain>> = (0..count)
        .into_par_iter()
        .map(|i| random_cocycle(k, r, sub_seed(seed, i as u64)))
        .collect();
    for (index, w) in draws.into_iter().enumerate() {
        let w = match w {
            Err(Error::TrivialCocycleSpace(_)) => {
                return Ok(CohomologyOutcome {
                    equivalent: true,
                    witnesses: 0,
                    distinguishing: None,
                })
            }
            other => other?,
        };
        let difference = evaluate(k, &w, c1)? - evaluate(k, &w, c2)?;
        if difference.abs() > scale {
            return Ok(CohomologyOutcome {
                equivalent: false,
                witnesses: index + 1,
                distinguishing: Some(Witness {
                    index,
                    difference,
                    cochain: w,
                }),
            });
        }
    }
    Ok(CohomologyOutcome {
        equivalent: true,
        witnesses: count,
        distinguishing: None,
    })
}
