use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_complex, complex_from_lists, Simplex, SimplicialComplex};
use crate::error::{Error, Result};

/// Canonical and random complexes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GeneratorKind {
    Point,
    Circle {
        m: usize,
    },
    HollowTriangle,
    FilledTriangle,
    TetrahedronBoundary,
    /// 3x3 grid triangulation of the torus (9 vertices, 27 edges, 18 triangles).
    Torus,
    /// Boundary of the octahedron.
    Sphere2,
    VietorisRips {
        points: Vec<Vec<f64>>,
        threshold: f64,
        max_dim: usize,
    },
    /// Vietoris–Rips complex of uniform random points in the unit cube.
    RandomVietorisRips {
        n_points: usize,
        ambient_dim: usize,
        threshold: f64,
        max_dim: usize,
    },
}

pub fn generate(kind: &GeneratorKind, seed: Option<u64>) -> Result<SimplicialComplex> {
    match kind {
        GeneratorKind::Point => complex_from_lists(&[&[0]], true),
        GeneratorKind::Circle { m } => {
            if *m < 3 {
                return Err(Error::BadParameter(format!("circle needs m >= 3, got {m}")));
            }
            let edges: Vec<Simplex> = (0..*m)
                .map(|i| Simplex::new(vec![i, (i + 1) % m]))
                .collect::<Result<_>>()?;
            build_complex(&edges, true)
        }
        GeneratorKind::HollowTriangle => complex_from_lists(&[&[0, 1], &[0, 2], &[1, 2]], true),
        GeneratorKind::FilledTriangle => complex_from_lists(&[&[0, 1, 2]], true),
        GeneratorKind::TetrahedronBoundary => {
            complex_from_lists(&[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]], true)
        }
        GeneratorKind::Torus => {
            let id = |i: usize, j: usize| 3 * (i % 3) + (j % 3);
            let mut tris = Vec::with_capacity(18);
            for i in 0..3 {
                for j in 0..3 {
                    tris.push(Simplex::new(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)])?);
                    tris.push(Simplex::new(vec![id(i, j), id(i, j + 1), id(i + 1, j + 1)])?);
                }
            }
            build_complex(&tris, true)
        }
        GeneratorKind::Sphere2 => {
            let mut tris = Vec::with_capacity(8);
            for a in [0, 1] {
                for b in [2, 3] {
                    for c in [4, 5] {
                        tris.push(Simplex::new(vec![a, b, c])?);
                    }
                }
            }
            build_complex(&tris, true)
        }
        GeneratorKind::VietorisRips {
            points,
            threshold,
            max_dim,
        } => vietoris_rips(points, *threshold, *max_dim),
        GeneratorKind::RandomVietorisRips {
            n_points,
            ambient_dim,
            threshold,
            max_dim,
        } => {
            let pts = random_points(*n_points, *ambient_dim, seed.unwrap_or(0));
            vietoris_rips(&pts, *threshold, *max_dim)
        }
    }
}

/// Uniform points in the unit cube.
pub fn random_points(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Every clique of at most `max_dim + 1` points whose pairwise distances are
/// strictly below `threshold`. All points appear as vertices.
pub fn vietoris_rips(points: &[Vec<f64>], threshold: f64, max_dim: usize) -> Result<SimplicialComplex> {
    if points.is_empty() {
        return Err(Error::BadParameter("no points".into()));
    }
    if max_dim > 3 {
        return Err(Error::BadParameter(format!("max_dim {max_dim} > 3")));
    }
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(Error::BadParameter(format!("bad threshold {threshold}")));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::BadParameter("points of mixed dimension".into()));
    }
    let n = points.len();
    // forward neighbours: j > i within threshold
    let nbrs: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (i + 1..n)
                .filter(|&j| distance(&points[i], &points[j]) < threshold)
                .collect()
        })
        .collect();

    let mut layers: Vec<Vec<Simplex>> = vec![Vec::new(); max_dim + 1];
    fn expand(
        clique: &mut Vec<usize>,
        candidates: &[usize],
        nbrs: &[Vec<usize>],
        max_dim: usize,
        layers: &mut [Vec<Simplex>],
    ) {
        layers[clique.len() - 1].push(Simplex::from_sorted(clique.clone()));
        if clique.len() > max_dim {
            return;
        }
        for (k, &v) in candidates.iter().enumerate() {
            let next: Vec<usize> = candidates[k + 1..]
                .iter()
                .copied()
                .filter(|w| nbrs[v].binary_search(w).is_ok())
                .collect();
            clique.push(v);
            expand(clique, &next, nbrs, max_dim, layers);
            clique.pop();
        }
    }
    for v in 0..n {
        let mut clique = vec![v];
        expand(&mut clique, &nbrs[v], &nbrs, max_dim, &mut layers);
    }
    for layer in layers.iter_mut() {
        layer.sort();
    }
    Ok(SimplicialComplex::from_layers(n, layers))
}

/// Figure-eight graph: two triangle loops glued at vertex 0.
pub fn figure_eight() -> SimplicialComplex {
    complex_from_lists(&[&[0, 1], &[1, 2], &[0, 2], &[0, 3], &[3, 4], &[0, 4]], true).expect("valid complex")
}

/// Square 0-1-2-3 with diagonal [0,2] and both triangles filled.
pub fn filled_square() -> SimplicialComplex {
    complex_from_lists(&[&[0, 1, 2], &[0, 2, 3]], true).expect("valid complex")
}

/// Two disjoint hollow triangles on vertices 0..3 and 3..6.
pub fn two_hollow_triangles() -> SimplicialComplex {
    complex_from_lists(&[&[0, 1], &[1, 2], &[0, 2], &[3, 4], &[4, 5], &[3, 5]], true).expect("valid complex")
}

/// A random inclusion of Vietoris–Rips complexes on a shared point cloud,
/// at thresholds `t1 < t2` drawn from `[lo, hi)`.
pub fn random_filtration(
    n_points: usize,
    ambient_dim: usize,
    max_dim: usize,
    (lo, hi): (f64, f64),
    seed: u64,
) -> Result<(SimplicialComplex, SimplicialComplex)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let pts = random_points(n_points, ambient_dim, seed);
    let a = rng.random_range(lo..hi);
    let b = rng.random_range(lo..hi);
    let (t1, t2) = if a <= b { (a, b) } else { (b, a) };
    Ok((vietoris_rips(&pts, t1, max_dim)?, vietoris_rips(&pts, t2, max_dim)?))
}
