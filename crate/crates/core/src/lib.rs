//! Mortar finite elements for 2D parabolic problems on rectangular subdomain
//! partitions with independently meshed, nonmatching subdomain grids.
//!
//! The crate is `no_std` (it needs `alloc`). Pipeline:
//!
//! 1. [`geometry`]: a [`Partition`] into rectangles, one [`SubdomainMesh`]
//!    per subdomain and the [`InterfaceSegment`]s between them.
//! 2. [`mortar`]: the multiplier space on each nonmortar trace and the
//!    [`CouplingMap`] expressing the interior nonmortar trace values through
//!    the mortar trace, which realizes the weakly continuous space.
//! 3. [`assembly`]: block mass/stiffness over the broken space and the
//!    Galerkin reduction `PᵀKP` onto the constrained space.
//! 4. [`solvers`]: discrete elliptic solution operator, projections,
//!    backward Euler and discrete negative seminorms.
//! 5. [`analysis`]: manufactured solutions, error norms and convergence
//!    studies.
#![no_std]

extern crate alloc;

pub mod analysis;
pub mod assembly;
pub mod conforming;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod linalg;
pub mod mortar;
pub mod solvers;

pub use analysis::{ConvergenceRecord, ManufacturedSolution};
pub use assembly::{DofClass, DofMap, MortarSpace, Prolongation};
pub use error::{Error, Result};
pub use fem::{Diffusivity, ReferenceElement};
pub use geometry::{InterfaceSegment, MeshSpec, MortarRule, Partition, Rect, SubdomainMesh};
pub use linalg::{Cholesky, SparseSymMatrix};
pub use mortar::{CouplingMap, MultiplierSpace};
pub use solvers::{EllipticOperator, TimeStepper};
