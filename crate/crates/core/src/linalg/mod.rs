//! Dense and sparse linear algebra used by assembly and the solvers.

mod cholesky;
mod dense;
mod sparse;

pub use cholesky::{reverse_cuthill_mckee, Cholesky};
pub use dense::{DenseMatrix, Lu};
pub use sparse::{CsrMatrix, SparseSymMatrix};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
