use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::complex::{ChainFile, Simplex, SimplicialComplex};
use crate::error::{Error, Result};

/// A rational `r`-chain `Σ a_i σ_i`, stored sparsely by 0-based index into
/// layer `r`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    r: usize,
    coeffs: BTreeMap<usize, BigRational>,
}

impl Chain {
    pub fn zero(r: usize) -> Self {
        Chain {
            r,
            coeffs: BTreeMap::new(),
        }
    }

    /// Sums repeated indices and drops zeros.
    pub fn new(r: usize, terms: impl IntoIterator<Item = (usize, BigRational)>) -> Self {
        let mut coeffs: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (i, a) in terms {
            *coeffs.entry(i).or_insert_with(BigRational::zero) += a;
        }
        coeffs.retain(|_, a| !a.is_zero());
        Chain { r, coeffs }
    }

    pub fn from_ints(r: usize, terms: &[(usize, i64)]) -> Self {
        Chain::new(r, terms.iter().map(|&(i, a)| (i, BigRational::from_integer(a.into()))))
    }

    /// Chain given by simplices (as vertex lists) of `k` with integer
    /// coefficients.
    pub fn from_simplices(k: &SimplicialComplex, terms: &[(&[usize], i64)]) -> Result<Self> {
        let r = terms
            .first()
            .map(|(s, _)| s.len().saturating_sub(1))
            .ok_or(Error::ZeroChain)?;
        let mut out = Vec::with_capacity(terms.len());
        for &(vs, a) in terms {
            let s = Simplex::new(vs.to_vec())?;
            if s.dim() != r {
                return Err(Error::DimensionMismatch(format!("{s} is not an {r}-simplex")));
            }
            let i = k.index_of(&s).ok_or_else(|| Error::NotASubcomplex(s.clone()))?;
            out.push((i, a));
        }
        Ok(Chain::from_ints(r, &out))
    }

    /// Dense rational vector of length `n`.
    pub fn from_dense(r: usize, values: &[BigRational]) -> Self {
        Chain::new(r, values.iter().cloned().enumerate())
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, BigRational> {
        &self.coeffs
    }

    pub fn get(&self, i: usize) -> BigRational {
        self.coeffs.get(&i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Indices with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs.keys().copied().collect()
    }

    /// Checks that every index lies in layer `r` of `k`.
    pub fn check_bound(&self, k: &SimplicialComplex) -> Result<()> {
        let len = k.count(self.r);
        if let Some((&index, _)) = self.coeffs.range(len..).next() {
            return Err(Error::IndexOutOfRange { r: self.r, index, len });
        }
        Ok(())
    }

    fn same_dim(&self, other: &Chain) -> Result<()> {
        if self.r != other.r {
            return Err(Error::DimensionMismatch(format!(
                "chains of dimension {} and {}",
                self.r, other.r
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Chain) -> Result<Chain> {
        self.same_dim(other)?;
        Ok(Chain::new(
            self.r,
            self.coeffs.iter().chain(&other.coeffs).map(|(&i, a)| (i, a.clone())),
        ))
    }

    /// `self − other`, exactly.
    pub fn sub(&self, other: &Chain) -> Result<Chain> {
        self.add(&other.scale(&-BigRational::from_integer(1.into())))
    }

    pub fn scale(&self, a: &BigRational) -> Chain {
        Chain::new(self.r, self.coeffs.iter().map(|(&i, c)| (i, c * a)))
    }

    pub fn to_dense(&self, n: usize) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); n];
        for (&i, a) in &self.coeffs {
            v[i] = a.clone();
        }
        v
    }

    pub fn to_f64(&self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        for (&i, a) in &self.coeffs {
            v[i] = a.to_f64().unwrap_or(f64::NAN);
        }
        v
    }

    pub fn norm_sq_exact(&self) -> BigRational {
        self.coeffs.values().map(|a| a * a).sum()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs
            .values()
            .map(|a| a.to_f64().unwrap_or(f64::NAN).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// The same chain over `to`, matching simplices by vertex set.
    pub fn transport(&self, from: &SimplicialComplex, to: &SimplicialComplex) -> Result<Chain> {
        self.check_bound(from)?;
        let layer = from.layer(self.r);
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for (&i, a) in &self.coeffs {
            let s = &layer[i];
            let j = to.index_of(s).ok_or_else(|| Error::NotASubcomplex(s.clone()))?;
            terms.push((j, a.clone()));
        }
        Ok(Chain::new(self.r, terms))
    }

    /// Reads the 1-based file form.
    pub fn from_file(f: &ChainFile) -> Result<Chain> {
        let mut terms = Vec::with_capacity(f.coeffs.len());
        for &(index, num, den) in &f.coeffs {
            if index == 0 {
                return Err(Error::Parse("chain indices are 1-based".into()));
            }
            if den == 0 {
                return Err(Error::Parse(format!("zero denominator at index {index}")));
            }
            terms.push((index - 1, BigRational::new(num.into(), den.into())));
        }
        Ok(Chain::new(f.r, terms))
    }

    /// The 1-based file form; fails if a coefficient does not fit in `i64`.
    pub fn to_file(&self) -> Result<ChainFile> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&i, a)| {
                let fit = |x: &BigInt| {
                    x.to_i64()
                        .ok_or_else(|| Error::BadParameter("coefficient exceeds 64 bits".into()))
                };
                Ok((i + 1, fit(a.numer())?, fit(a.denom())?))
            })
            .collect::<Result<_>>()?;
        Ok(ChainFile { r: self.r, coeffs })
    }
}
