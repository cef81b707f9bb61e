use super::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};

/// A validated inclusion `K1 ⊆ K2`.
///
/// `k2` is stored reordered so that, in every layer, the simplices of `k1`
/// come first and in `k1`'s order. `embed[r][i]` is the position in `k2`'s
/// layer `r` of `k1`'s `i`-th `r`-simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct FiltrationPair {
    pub k1: SimplicialComplex,
    pub k2: SimplicialComplex,
    pub embed: Vec<Vec<usize>>,
}

impl FiltrationPair {
    /// Indices of `k2`'s layer `r` not coming from `k1` (a contiguous suffix).
    pub fn new_indices(&self, r: usize) -> std::ops::Range<usize> {
        self.k1.count(r)..self.k2.count(r)
    }
}

pub fn validate_filtration(k1: &SimplicialComplex, k2: &SimplicialComplex) -> Result<FiltrationPair> {
    for s in k1.simplices() {
        if !k2.contains(s) {
            return Err(Error::NotASubcomplex(s.clone()));
        }
    }
    let top = k2.max_dim().map_or(0, |d| d + 1);
    let mut layers: Vec<Vec<Simplex>> = Vec::with_capacity(top);
    for r in 0..top {
        let old = k1.layer(r);
        let mut layer: Vec<Simplex> = old.to_vec();
        layer.extend(k2.layer(r).iter().filter(|s| !k1.contains(s)).cloned());
        layers.push(layer);
    }
    let embed = (0..=k1.max_dim().unwrap_or(0))
        .map(|r| (0..k1.count(r)).collect())
        .collect();
    let reordered = SimplicialComplex::from_layers(k2.n().max(k1.n()), layers)
        .with_vertex_map(k2.vertex_map().map(<[u64]>::to_vec));
    Ok(FiltrationPair {
        k1: k1.clone(),
        k2: reordered,
        embed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::complex_from_lists;

    fn hollow() -> SimplicialComplex {
        complex_from_lists(&[&[0, 1], &[0, 2], &[1, 2]], true).unwrap()
    }

    fn filled() -> SimplicialComplex {
        complex_from_lists(&[&[0, 1, 2]], true).unwrap()
    }

    #[test]
    fn hollow_into_filled() {
        let f = validate_filtration(&hollow(), &filled()).unwrap();
        assert_eq!(f.embed[1], vec![0, 1, 2]);
        assert_eq!(f.embed.len(), 2);
        assert_eq!(f.new_indices(2), 0..1);
    }

    #[test]
    fn filled_into_hollow_rejected() {
        let err = validate_filtration(&filled(), &hollow()).unwrap_err();
        assert_eq!(err, Error::NotASubcomplex(Simplex::new(vec![0, 1, 2]).unwrap()));
    }

    #[test]
    fn edge_moves_to_prefix() {
        let k1 = complex_from_lists(&[&[1, 2]], true).unwrap();
        let f = validate_filtration(&k1, &hollow()).unwrap();
        assert_eq!(f.k2.layer(1)[f.embed[1][0]], Simplex::new(vec![1, 2]).unwrap());
        assert_eq!(f.embed[1][0], 0);
        for r in 0..=1 {
            for (i, &j) in f.embed[r].iter().enumerate() {
                assert_eq!(f.k2.layer(r)[j], f.k1.layer(r)[i]);
            }
        }
    }

    #[test]
    fn identity_filtration() {
        let k = filled();
        let f = validate_filtration(&k, &k).unwrap();
        assert_eq!(f.k2, k);
        for r in 0..=2 {
            assert_eq!(f.embed[r], (0..k.count(r)).collect::<Vec<_>>());
        }
    }
}
