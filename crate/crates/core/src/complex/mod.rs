//! Simplicial complexes, their face-incidence specification matrices,
//! filtrations, generators and the line-oriented JSON file format.

mod filtration;
mod generate;
mod io;
mod simplex;

use std::collections::{BTreeSet, HashMap, HashSet};

pub use filtration::{validate_filtration, FiltrationPair};
pub use generate::{
    figure_eight, filled_square, generate, random_filtration, random_points, two_hollow_triangles, vietoris_rips,
    GeneratorKind,
};
pub use io::{
    chain_file_from_str, chain_file_to_string, load_complex, load_filtration, parse_complex, save_complex,
    write_complex, ChainFile,
};
pub use simplex::Simplex;

use crate::error::{Error, Result};

/// A closed simplicial complex on vertices `0..n`.
///
/// Each layer `r` is an ordered list of `r`-simplices; a simplex's position
/// in its layer is its (0-based) index. Complexes are immutable once built.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    n: usize,
    layers: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
    vertex_map: Option<Vec<u64>>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.layers == other.layers && self.vertex_map == other.vertex_map
    }
}

impl Eq for SimplicialComplex {}

impl SimplicialComplex {
    /// Builds from layers that are already known to be closed and
    /// duplicate-free.
    pub(crate) fn from_layers(n: usize, mut layers: Vec<Vec<Simplex>>) -> Self {
        while layers.last().is_some_and(|l| l.is_empty()) {
            layers.pop();
        }
        let index = layers
            .iter()
            .map(|layer| layer.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        SimplicialComplex {
            n,
            layers,
            index,
            vertex_map: None,
        }
    }

    pub(crate) fn with_vertex_map(mut self, map: Option<Vec<u64>>) -> Self {
        self.vertex_map = map;
        self
    }

    /// Number of vertex ids (`0..n`).
    pub fn n(&self) -> usize {
        self.n
    }

    /// External vertex ids, when the complex was loaded with a remap.
    pub fn vertex_map(&self) -> Option<&[u64]> {
        self.vertex_map.as_deref()
    }

    /// Highest dimension with at least one simplex.
    pub fn max_dim(&self) -> Option<usize> {
        self.layers.len().checked_sub(1)
    }

    /// The `r`-simplices in index order; empty past the top dimension.
    pub fn layer(&self, r: usize) -> &[Simplex] {
        self.layers.get(r).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `|S_r|`.
    pub fn count(&self, r: usize) -> usize {
        self.layer(r).len()
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s.dim())?.get(s).copied()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    /// Total number of simplices over all dimensions.
    pub fn total(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// All simplices, layer by layer in index order.
    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.layers.iter().flatten()
    }

    /// Errors with `EmptyLayer(r)` unless layer `r` has a simplex.
    pub fn require_layer(&self, r: usize) -> Result<usize> {
        match self.count(r) {
            0 => Err(Error::EmptyLayer(r)),
            c => Ok(c),
        }
    }
}

/// Builds a complex from a simplex list.
///
/// Explicitly listed simplices keep their input order within their layer;
/// faces added by `autoclose` follow, in lexicographic order. Without
/// `autoclose` every face must already be listed.
pub fn build_complex(simplices: &[Simplex], autoclose: bool) -> Result<SimplicialComplex> {
    if simplices.is_empty() {
        return Err(Error::EmptyInput);
    }
    let top = simplices.iter().map(Simplex::dim).max().unwrap_or(0);
    let mut explicit: Vec<Vec<Simplex>> = vec![Vec::new(); top + 1];
    let mut seen: Vec<HashSet<Simplex>> = vec![HashSet::new(); top + 1];
    for s in simplices {
        if !seen[s.dim()].insert(s.clone()) {
            return Err(Error::DuplicateSimplex(s.clone()));
        }
        explicit[s.dim()].push(s.clone());
    }

    let mut layers = explicit;
    if autoclose {
        for r in (1..=top).rev() {
            let mut added = BTreeSet::new();
            for s in &layers[r] {
                for (_, face) in s.faces() {
                    if !seen[r - 1].contains(&face) {
                        added.insert(face);
                    }
                }
            }
            for face in added {
                seen[r - 1].insert(face.clone());
                layers[r - 1].push(face);
            }
        }
    } else {
        for r in 1..=top {
            for s in &layers[r] {
                for (_, face) in s.faces() {
                    if !seen[r - 1].contains(&face) {
                        return Err(Error::MissingFace {
                            simplex: s.clone(),
                            face,
                        });
                    }
                }
            }
        }
    }
    let n = simplices.iter().map(Simplex::max_vertex).max().unwrap_or(0) + 1;
    Ok(SimplicialComplex::from_layers(n, layers))
}

/// Convenience wrapper over [`build_complex`] taking raw vertex lists.
pub fn complex_from_lists(lists: &[&[usize]], autoclose: bool) -> Result<SimplicialComplex> {
    let simplices = lists
        .iter()
        .map(|l| Simplex::new(l.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    build_complex(&simplices, autoclose)
}

/// The 0/1 face-incidence matrix between `(r-1)`- and `r`-simplices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecMatrix {
    pub r: usize,
    pub rows: usize,
    /// Per column (an `r`-simplex), the sorted row indices of its faces.
    pub columns: Vec<Vec<usize>>,
}

impl SpecMatrix {
    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        u8::from(self.columns[col].binary_search(&row).is_ok())
    }

    pub fn column_sums(&self) -> Vec<usize> {
        self.columns.iter().map(Vec::len).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.cols()]; self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for &r in col {
                out[r][c] = 1;
            }
        }
        out
    }

    /// Largest number of shared nonzero rows over all pairs of distinct
    /// columns.
    pub fn max_column_overlap(&self) -> usize {
        let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for &r in col {
                row_cols[r].push(c);
            }
        }
        let mut shared: HashMap<(usize, usize), usize> = HashMap::new();
        for cols in &row_cols {
            for (i, &a) in cols.iter().enumerate() {
                for &b in &cols[i + 1..] {
                    *shared.entry((a, b)).or_default() += 1;
                }
            }
        }
        shared.values().copied().max().unwrap_or(0)
    }
}

pub fn spec_matrix(k: &SimplicialComplex, r: usize) -> Result<SpecMatrix> {
    if r == 0 {
        return Err(Error::BadParameter("spec matrix needs r >= 1".into()));
    }
    k.require_layer(r)?;
    let columns = k
        .layer(r)
        .iter()
        .map(|s| {
            let mut rows: Vec<usize> = s
                .faces()
                .map(|(_, f)| k.index_of(&f).expect("complex is closed"))
                .collect();
            rows.sort_unstable();
            rows
        })
        .collect();
    Ok(SpecMatrix {
        r,
        rows: k.count(r - 1),
        columns,
    })
}
