//! Envelope (skyline) Cholesky factorization with reverse Cuthill–McKee
//! ordering. Fill is confined to the profile of the permuted matrix, which for
//! structured 2D meshes stays at O(n^1.5).

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::SparseSymMatrix;
use crate::error::{Error, Result};

/// Reverse Cuthill–McKee permutation: `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &SparseSymMatrix) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    let mut nbrs = Vec::new();
    while order.len() < n {
        // lowest-degree unvisited node starts the next component
        let start = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree[i], i))
            .unwrap();
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            nbrs.clear();
            nbrs.extend(a.row(v).0.iter().copied().filter(|&w| !visited[w]));
            nbrs.sort_by_key(|&w| (degree[w], w));
            for &w in &nbrs {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// `L Lᵀ = P A Pᵀ` in row-envelope storage.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    perm: Vec<usize>,
    /// first stored column of each row of L
    first: Vec<usize>,
    /// offset of row i's first stored entry in `values`
    start: Vec<usize>,
    values: Vec<f64>,
    min_pivot: f64,
}

impl Cholesky {
    pub fn factor(a: &SparseSymMatrix) -> Result<Self> {
        let perm = reverse_cuthill_mckee(a);
        Self::factor_with_ordering(a, perm)
    }

    pub fn factor_with_ordering(a: &SparseSymMatrix, perm: Vec<usize>) -> Result<Self> {
        let n = a.dim();
        if perm.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: perm.len(),
            });
        }
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for old in 0..n {
            let i = inv[old];
            for &oj in a.row(old).0 {
                let j = inv[oj];
                if j < first[i] {
                    first[i] = j;
                }
            }
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut values = vec![0.0; start[n]];
        for old in 0..n {
            let i = inv[old];
            let (c, v) = a.row(old);
            for (&oj, &x) in c.iter().zip(v) {
                let j = inv[oj];
                if j <= i {
                    values[start[i] + (j - first[i])] = x;
                }
            }
        }

        let mut min_pivot = f64::INFINITY;
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let ri = start[i] - fi;
                let rj = start[j] - fj;
                let mut s = values[ri + j];
                for k in lo..j {
                    s -= values[ri + k] * values[rj + k];
                }
                values[ri + j] = s / values[rj + j];
            }
            let ri = start[i] - fi;
            let mut d = values[ri + i];
            for k in fi..i {
                d -= values[ri + k] * values[ri + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { row: perm[i], pivot: d });
            }
            min_pivot = min_pivot.min(d);
            values[ri + i] = libm::sqrt(d);
        }
        Ok(Self {
            n,
            perm,
            first,
            start,
            values,
            min_pivot,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Smallest diagonal pivot encountered (before the square root).
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn stored_entries(&self) -> usize {
        self.values.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let ri = self.start[i] - fi;
            let mut s = y[i];
            for k in fi..i {
                s -= self.values[ri + k] * y[k];
            }
            y[i] = s / self.values[ri + i];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let ri = self.start[i] - fi;
            let xi = y[i] / self.values[ri + i];
            y[i] = xi;
            for k in fi..i {
                y[k] -= self.values[ri + k] * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}
