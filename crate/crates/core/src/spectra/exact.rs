use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::{FiltrationPair, SimplicialComplex};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::operators::{boundary_or_zero, laplacian, persistent_laplacian, SparseIntMatrix};

/// Rank of an integer matrix (row-major) by fraction-free Bareiss
/// elimination. Every intermediate entry is a minor of the input, so the
/// divisions are exact.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let (head, tail) = m.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        let pivot = &pivot_row[col];
        for row in tail.iter_mut() {
            let factor = row[col].clone();
            for j in col + 1..ncols {
                let v = &row[j] * pivot - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = pivot.clone();
        rank += 1;
    }
    rank
}

/// Exact rank of a rational matrix: each row is cleared of denominators by
/// their lcm and the integer matrix goes through [`bareiss_rank`].
pub fn exact_rank(m: &[Vec<BigRational>]) -> usize {
    let rows = m
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    bareiss_rank(rows)
}

pub fn exact_rank_int(m: &SparseIntMatrix) -> usize {
    let rows = m
        .to_dense()
        .into_iter()
        .map(|row| row.into_iter().map(BigInt::from).collect())
        .collect();
    bareiss_rank(rows)
}

pub fn to_rational(m: &SparseIntMatrix) -> Vec<Vec<BigRational>> {
    m.to_dense()
        .into_iter()
        .map(|row| row.into_iter().map(|v| BigRational::from_integer(v.into())).collect())
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, p) in row[col..ncols].iter_mut().zip(&pivot[col..ncols]) {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Basis of the right null space of `m`, one vector per free column.
pub fn nullspace(m: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![BigRational::zero(); ncols];
            v[free] = BigRational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -a[row][free].clone();
            }
            v
        })
        .collect()
}

/// Whether `b` lies in the column space of `a`, by eliminating `[a | b]`.
pub fn in_column_space(a: &[Vec<BigRational>], b: &[BigRational]) -> bool {
    if b.iter().all(Zero::is_zero) {
        return true;
    }
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, x)| {
            let mut row = row.clone();
            row.push(x.clone());
            row
        })
        .collect();
    let width = aug.first().map_or(0, Vec::len);
    let pivots = rref(&mut aug);
    !pivots.contains(&(width - 1))
}

/// `β_r = |S_r| − rank(Δ_r)`, exactly.
pub fn exact_betti(k: &SimplicialComplex, r: usize) -> Result<usize> {
    let n = k.require_layer(r)?;
    Ok(n - exact_rank_int(&laplacian(k, r)?))
}

/// `β_r = dim ker ∂_r − rank ∂_{r+1}`, the textbook definition.
pub fn betti_from_definition(k: &SimplicialComplex, r: usize) -> Result<usize> {
    let n = k.require_layer(r)?;
    let cycles = n - exact_rank_int(&boundary_or_zero(k, r));
    Ok(cycles - exact_rank_int(&boundary_or_zero(k, r + 1)))
}

/// Both evaluations of a persistent Betti number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersistentBetti {
    /// Subspace route: `dim Z − dim(im ∂_{r+1}^{K2} ∩ Z)` with `Z = ker ∂_r^{K1}`.
    pub route_a: usize,
    /// Numeric kernel dimension of the persistent Laplacian.
    pub route_b: usize,
}

/// Absolute eigenvalue threshold for route B, relative to the operator scale.
pub const ROUTE_B_RTOL: f64 = 1e-8;

pub fn persistent_betti_routes(f: &FiltrationPair, r: usize) -> Result<PersistentBetti> {
    let n1 = f.k1.require_layer(r)?;
    let n2 = f.k2.count(r);

    let z = nullspace(&to_rational(&boundary_or_zero(&f.k1, r)), n1);
    let dim_z = z.len();
    let up = to_rational(&boundary_or_zero(&f.k2, r + 1));
    let rank_up = exact_rank(&up);
    // [∂_{r+1}^{K2} | Z], with Z padded by zeros on the new r-simplices
    let joined: Vec<Vec<BigRational>> = (0..n2)
        .map(|i| {
            let mut row = up[i].clone();
            row.extend(
                z.iter()
                    .map(|v| if i < n1 { v[i].clone() } else { BigRational::zero() }),
            );
            row
        })
        .collect();
    let rank_joined = exact_rank(&joined);
    let intersection = rank_up + dim_z - rank_joined;
    let route_a = dim_z - intersection;

    let total = persistent_laplacian(f, r)?.total;
    let ev = symmetric_eigenvalues(&total);
    let scale = ev.iter().fold(1.0_f64, |a, &b| a.max(b.abs()));
    let route_b = ev.iter().filter(|&&l| l <= ROUTE_B_RTOL * scale).count();
    Ok(PersistentBetti { route_a, route_b })
}

/// Persistent Betti number via the subspace route, checked against the
/// Laplacian kernel.
pub fn exact_persistent_betti(f: &FiltrationPair, r: usize) -> Result<usize> {
    let routes = persistent_betti_routes(f, r)?;
    if routes.route_a != routes.route_b {
        return Err(Error::RouteDisagreement {
            route_a: routes.route_a,
            route_b: routes.route_b,
        });
    }
    Ok(routes.route_a)
}

/// Smallest eigenvalue above `rtol * λ_max`, if any.
pub fn smallest_nonzero_eigenvalue(ev: &[f64], rtol: f64) -> Option<f64> {
    let top = ev.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    ev.iter()
        .copied()
        .filter(|&l| l > rtol * top && l > 0.0)
        .min_by(f64::total_cmp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{complex_from_lists, generate, validate_filtration, GeneratorKind};
    use crate::operators::boundary_matrix;

    fn gen(kind: GeneratorKind) -> SimplicialComplex {
        generate(&kind, None).unwrap()
    }

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn rank_examples() {
        let d1 = boundary_matrix(&gen(GeneratorKind::HollowTriangle), 1).unwrap();
        assert_eq!(exact_rank(&to_rational(&d1.matrix)), 2);
        let id: Vec<Vec<BigRational>> = (0..5).map(|i| (0..5).map(|j| q((i == j) as i64)).collect()).collect();
        assert_eq!(exact_rank(&id), 5);
        let zero = vec![vec![q(0); 7]; 4];
        assert_eq!(exact_rank(&zero), 0);
        assert_eq!(exact_rank(&[]), 0);
    }

    #[test]
    fn rank_with_fractions() {
        let half = BigRational::new(1.into(), 2.into());
        let third = BigRational::new(1.into(), 3.into());
        let m = vec![vec![half.clone(), third.clone()], vec![q(3), q(2)]];
        assert_eq!(exact_rank(&m), 1);
    }

    #[test]
    fn rank_skips_zero_columns() {
        let m = vec![vec![q(0), q(1), q(2)], vec![q(0), q(2), q(4)], vec![q(0), q(0), q(1)]];
        assert_eq!(exact_rank(&m), 2);
    }

    #[test]
    fn betti_examples() {
        let h = gen(GeneratorKind::HollowTriangle);
        assert_eq!(exact_betti(&h, 0).unwrap(), 1);
        assert_eq!(exact_betti(&h, 1).unwrap(), 1);
        let t = gen(GeneratorKind::TetrahedronBoundary);
        assert_eq!(
            (0..3).map(|r| exact_betti(&t, r).unwrap()).collect::<Vec<_>>(),
            vec![1, 0, 1]
        );
        assert_eq!(exact_betti(&gen(GeneratorKind::FilledTriangle), 1).unwrap(), 0);
        assert_eq!(exact_betti(&h, 2), Err(Error::EmptyLayer(2)));
    }

    #[test]
    fn definition_agrees_on_fixtures() {
        for kind in [
            GeneratorKind::Point,
            GeneratorKind::Circle { m: 6 },
            GeneratorKind::Torus,
            GeneratorKind::Sphere2,
            GeneratorKind::TetrahedronBoundary,
        ] {
            let k = gen(kind);
            for r in 0..=k.max_dim().unwrap() {
                assert_eq!(exact_betti(&k, r).unwrap(), betti_from_definition(&k, r).unwrap());
            }
        }
        let torus = gen(GeneratorKind::Torus);
        assert_eq!(
            (0..3).map(|r| exact_betti(&torus, r).unwrap()).collect::<Vec<_>>(),
            vec![1, 2, 1]
        );
    }

    #[test]
    fn nullspace_is_annihilated() {
        let d = to_rational(&boundary_matrix(&gen(GeneratorKind::Torus), 1).unwrap().matrix);
        let ns = nullspace(&d, 27);
        assert_eq!(ns.len(), 27 - 8);
        for v in &ns {
            for row in &d {
                let s: BigRational = row.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn column_space_membership() {
        let a = vec![vec![q(1), q(0)], vec![q(1), q(0)], vec![q(0), q(1)]];
        assert!(in_column_space(&a, &[q(2), q(2), q(5)]));
        assert!(!in_column_space(&a, &[q(1), q(0), q(0)]));
        assert!(in_column_space(&a, &[q(0), q(0), q(0)]));
    }

    #[test]
    fn persistent_examples() {
        let f = validate_filtration(&gen(GeneratorKind::HollowTriangle), &gen(GeneratorKind::FilledTriangle)).unwrap();
        assert_eq!(exact_persistent_betti(&f, 1).unwrap(), 0);

        let c4 = gen(GeneratorKind::Circle { m: 4 });
        let f = validate_filtration(&c4, &c4).unwrap();
        assert_eq!(exact_persistent_betti(&f, 1).unwrap(), 1);

        let k1 = complex_from_lists(&[&[0], &[1]], false).unwrap();
        let k2 = complex_from_lists(&[&[0, 1]], true).unwrap();
        let f = validate_filtration(&k1, &k2).unwrap();
        assert_eq!(exact_persistent_betti(&f, 0).unwrap(), 1);
    }

    #[test]
    fn smallest_gap() {
        assert_eq!(smallest_nonzero_eigenvalue(&[0.0, 1e-14, 0.3, 0.9], 1e-9), Some(0.3));
        assert_eq!(smallest_nonzero_eigenvalue(&[0.0, 0.0], 1e-9), None);
    }
}
