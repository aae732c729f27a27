use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate triplets; column indices within a row come out sorted.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        // stable: duplicates are summed in insertion order
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            debug_assert!(i < nrows && j < ncols);
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| {
                let (c, v) = self.row(i);
                c.iter().zip(v).map(|(&j, a)| a * x[j]).sum()
            })
            .collect()
    }

    pub fn transpose_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0.0 {
                continue;
            }
            let (c, v) = self.row(i);
            for (&j, a) in c.iter().zip(v) {
                y[j] += a * xi;
            }
        }
        y
    }
}

/// Symmetric sparse matrix stored with both triangles.
///
/// Only the upper triangle is ever summed; the lower one is a mirror, so
/// `K[i][j] == K[j][i]` holds bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    csr: CsrMatrix,
}

impl SparseSymMatrix {
    /// Builds from triplets of a symmetric operator. Entries with `i > j`
    /// are dropped: the caller must supply every contribution to the upper
    /// triangle (which a symmetric element loop does naturally).
    pub fn from_upper_triplets(n: usize, triplets: Vec<(usize, usize, f64)>) -> Self {
        let upper: Vec<_> = triplets.into_iter().filter(|t| t.0 <= t.1).collect();
        let upper = CsrMatrix::from_triplets(n, n, upper);
        let mut full = Vec::with_capacity(2 * upper.nnz());
        for i in 0..n {
            let (c, v) = upper.row(i);
            for (&j, &a) in c.iter().zip(v) {
                full.push((i, j, a));
                if j != i {
                    full.push((j, i, a));
                }
            }
        }
        Self {
            csr: CsrMatrix::from_triplets(n, n, full),
        }
    }

    pub fn from_dense_upper(a: &crate::linalg::DenseMatrix) -> Self {
        let mut t = Vec::new();
        for i in 0..a.rows() {
            for j in i..a.cols() {
                let v = a.get(i, j);
                if v != 0.0 {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_upper_triplets(a.rows(), t)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.csr.nrows
    }

    pub fn nnz(&self) -> usize {
        self.csr.nnz()
    }

    pub fn csr(&self) -> &CsrMatrix {
        &self.csr
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.csr.get(i, j)
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        self.csr.row(i)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.csr.mul_vec(x)
    }

    /// `xᵀ K y`
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul_vec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `a·self + b·other` (patterns may differ).
    pub fn linear_combination(&self, a: f64, other: &SparseSymMatrix, b: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for (m, s) in [(self, a), (other, b)] {
            for i in 0..m.dim() {
                let (c, v) = m.row(i);
                for (&j, &x) in c.iter().zip(v) {
                    if j >= i {
                        t.push((i, j, s * x));
                    }
                }
            }
        }
        Ok(Self::from_upper_triplets(self.dim(), t))
    }

    /// Maximum of `|K_ij - K_ji|`; zero by construction.
    pub fn asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim() {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                m = m.max((x - self.get(j, i)).abs());
            }
        }
        m
    }

    pub fn to_dense(&self) -> crate::linalg::DenseMatrix {
        let n = self.dim();
        let mut d = crate::linalg::DenseMatrix::zeros(n, n);
        for i in 0..n {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                d.set(i, j, x);
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 1, 1.0), (1, 0, 2.0), (0, 1, 0.5)]);
        assert_eq!(m.get(0, 1), 1.5);
        assert_eq!(m.get(1, 0), 2.0);
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn symmetric_mirror_is_exact() {
        let s = SparseSymMatrix::from_upper_triplets(
            3,
            vec![(0, 0, 2.0), (0, 2, 0.1), (0, 2, 0.2), (2, 0, 99.0), (1, 1, 1.0)],
        );
        assert_eq!(s.get(2, 0), s.get(0, 2));
        assert!((s.get(0, 2) - 0.3).abs() < 1e-16);
        assert_eq!(s.asymmetry(), 0.0);
    }

    #[test]
    fn transpose_product_matches_dense() {
        let m = CsrMatrix::from_triplets(3, 2, vec![(0, 0, 1.0), (1, 1, 2.0), (2, 0, -1.0), (2, 1, 3.0)]);
        let y = m.transpose_mul_vec(&[1.0, 2.0, 3.0]);
        assert_eq!(y, vec![1.0 - 3.0, 4.0 + 9.0]);
    }
}
