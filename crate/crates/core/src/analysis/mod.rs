//! Manufactured solutions, error norms, convergence orders and the
//! experiment drivers built on them.

mod eoc;
mod manufactured;
mod norms;
mod study;

pub use eoc::{eoc, fitted_slope, order, time_eoc, ConvergenceRecord};
pub use manufactured::{ManufacturedSolution, Profile1d, TimeFactor};
pub use norms::{error_norms, functional_error, ErrorNorms};
pub use study::{
    spatial_study, stationary_study, superconvergence_study, temporal_study, Experiment, MeshLayout, Run, TimeStep,
};
