//! Reference-element machinery: Gauss quadrature, Lagrange bases on
//! Gauss–Lobatto nodes and local element matrices.

mod element;
mod lagrange;
mod quadrature;

pub use element::{local_load, local_matrices, Diffusivity, ReferenceElement};
pub use lagrange::Lagrange1d;
pub use quadrature::{gauss_legendre, gauss_lobatto_nodes, QuadratureRule};
