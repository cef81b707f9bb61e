use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;

/// Column-compressed integer matrix. Columns hold `(row, value)` pairs sorted
/// by row with no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    columns: Vec<Vec<(usize, i64)>>,
}

impl SparseIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseIntMatrix {
            rows,
            columns: vec![Vec::new(); cols],
        }
    }

    /// Builds from per-column entries; duplicate rows are summed and zeros
    /// dropped.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, i64)>>) -> Self {
        let columns = columns
            .into_iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
                for (r, v) in col {
                    assert!(r < rows, "row {r} out of range {rows}");
                    *acc.entry(r).or_default() += v;
                }
                acc.into_iter().filter(|&(_, v)| v != 0).collect()
            })
            .collect();
        SparseIntMatrix { rows, columns }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let columns = (0..ncols)
            .map(|j| {
                (0..nrows)
                    .filter(|&i| rows[i][j] != 0)
                    .map(|i| (i, rows[i][j]))
                    .collect()
            })
            .collect();
        SparseIntMatrix { rows: nrows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, i64)] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<(usize, i64)>] {
        &self.columns
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        let col = &self.columns[j];
        col.binary_search_by_key(&i, |&(r, _)| r).map_or(0, |k| col[k].1)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn frobenius_sq(&self) -> i64 {
        self.columns.iter().flatten().map(|&(_, v)| v * v).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<Vec<(usize, i64)>> = vec![Vec::new(); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                cols[i].push((j, v));
            }
        }
        SparseIntMatrix {
            rows: self.cols(),
            columns: cols,
        }
    }

    /// Exact integer product `self * other`.
    pub fn matmul(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.cols(), other.rows, "inner dimensions differ");
        let columns = other
            .columns
            .iter()
            .map(|bcol| {
                let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
                for &(k, bv) in bcol {
                    for &(i, av) in &self.columns[k] {
                        *acc.entry(i).or_default() += av * bv;
                    }
                }
                acc.into_iter().filter(|&(_, v)| v != 0).collect()
            })
            .collect();
        SparseIntMatrix {
            rows: self.rows,
            columns,
        }
    }

    pub fn add(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!((self.rows, self.cols()), (other.rows, other.cols()));
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        SparseIntMatrix::from_columns(self.rows, columns)
    }

    /// Rows `row_range` and columns `col_range` as a new matrix.
    pub fn block(&self, row_range: std::ops::Range<usize>, col_range: std::ops::Range<usize>) -> SparseIntMatrix {
        let columns = self.columns[col_range]
            .iter()
            .map(|col| {
                col.iter()
                    .filter(|(r, _)| row_range.contains(r))
                    .map(|&(r, v)| (r - row_range.start, v))
                    .collect()
            })
            .collect();
        SparseIntMatrix {
            rows: row_range.len(),
            columns,
        }
    }

    /// Appends the columns of `other` on the right.
    pub fn hstack(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        SparseIntMatrix {
            rows: self.rows,
            columns,
        }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.cols(), other.cols());
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| {
                a.iter()
                    .copied()
                    .chain(b.iter().map(|&(r, v)| (r + self.rows, v)))
                    .collect()
            })
            .collect();
        SparseIntMatrix {
            rows: self.rows + other.rows,
            columns,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; self.cols()]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                out[i][j] = v;
            }
        }
        out
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols());
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                m[(i, j)] = v as f64;
            }
        }
        m
    }

    /// `self * x` for a dense vector.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            if x[j] != 0.0 {
                for &(i, v) in col {
                    y[i] += v as f64 * x[j];
                }
            }
        }
        y
    }

    /// MatrixMarket coordinate format, 1-based indices.
    pub fn to_matrix_market(&self) -> String {
        let mut out = String::from("%%MatrixMarket matrix coordinate integer general\n");
        writeln!(out, "{} {} {}", self.rows, self.cols(), self.nnz()).unwrap();
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                writeln!(out, "{} {} {}", i + 1, j + 1, v).unwrap();
            }
        }
        out
    }
}

/// MatrixMarket coordinate format for a dense real matrix; entries with
/// magnitude below `1e-15` are omitted.
pub fn dense_to_matrix_market(m: &DMatrix<f64>) -> String {
    let entries: Vec<(usize, usize, f64)> = (0..m.ncols())
        .flat_map(|j| (0..m.nrows()).map(move |i| (i, j)))
        .map(|(i, j)| (i, j, m[(i, j)]))
        .filter(|&(_, _, v)| v.abs() > 1e-15)
        .collect();
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    writeln!(out, "{} {} {}", m.nrows(), m.ncols(), entries.len()).unwrap();
    for (i, j, v) in entries {
        writeln!(out, "{} {} {:e}", i + 1, j + 1, v).unwrap();
    }
    out
}
