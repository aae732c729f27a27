use alloc::string::String;

/// Errors raised while building or solving a mortar discretization.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("subdomain {index} has non-positive or non-finite extent")]
    DegenerateSubdomain { index: usize },

    #[error("subdomains {a} and {b} overlap")]
    Overlap { a: usize, b: usize },

    #[error("subdomains {a} and {b} share a partial edge; only full-edge interfaces are supported")]
    NonconformingInterface { a: usize, b: usize },

    #[error("unknown partition preset `{0}`")]
    UnknownPreset(String),

    #[error("subdomain index {index} out of range (partition has {count})")]
    SubdomainOutOfRange { index: usize, count: usize },

    #[error("invalid mesh for subdomain {subdomain}: {reason}")]
    InvalidMesh { subdomain: usize, reason: &'static str },

    #[error("expected {expected} meshes, got {got}")]
    MeshCount { expected: usize, got: usize },

    #[error("interface {gamma}: nonmortar trace has {subintervals} subinterval(s), at least 2 required")]
    NonmortarTooCoarse { gamma: usize, subintervals: usize },

    #[error("interface {gamma}: mortar override names subdomain {subdomain}, which is not adjacent")]
    InvalidMortarOverride { gamma: usize, subdomain: usize },

    #[error("multiplier space needs at least 2 subintervals and degree >= 1 (got {subintervals}, {degree})")]
    InvalidMultiplierSpace { subintervals: usize, degree: usize },

    #[error("interface meshes do not cover the same interval")]
    MismatchedExtent,

    #[error("quadrature rule needs at least one point")]
    EmptyQuadrature,

    #[error("polynomial degree must be at least 1")]
    ZeroDegree,

    #[error("degenerate cell")]
    DegenerateCell,

    #[error("singular dense system (pivot {pivot:e} at column {column})")]
    SingularSystem { column: usize, pivot: f64 },

    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("node {node} of subdomain {subdomain} is constrained by two interfaces")]
    ChainedConstraint { subdomain: usize, node: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },

    #[error("quadratic form is negative beyond round-off ({value:e}); the operator is not positive definite")]
    NegativeQuadraticForm { value: f64 },

    #[error("need at least 2 resolutions")]
    TooFewResolutions,

    #[error("mesh parameters must be strictly decreasing")]
    NonMonotoneMeshSize,

    #[error("negative-norm superconvergence needs degree >= 2 (the solution must be smoother than the degree-1 regularity bound allows)")]
    RegularityRequirement,
}

pub type Result<T> = core::result::Result<T, Error>;
