use thiserror::Error;

/// Errors raised by the geometry and quadrature routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basis is not orthonormal (Gram defect {defect:.3e})")]
    NonOrthonormalBasis { defect: f64 },

    #[error("real dimension {dim} exceeds the supported cap of {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },

    #[error("Minkowski sum would enumerate {count} vertex combinations (cap {cap})")]
    VertexProductCapExceeded { count: usize, cap: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("ambient dimension mismatch: expected {expected}, found {found}")]
    AmbientMismatch { expected: usize, found: usize },

    #[error("face {0} not found")]
    FaceNotFound(usize),

    #[error("face spans fewer than {expected} dimensions")]
    DegenerateFace { expected: usize },

    #[error("body does not lie in the given subspace (residual {residual:.3e})")]
    SubspaceMismatch { residual: f64 },

    #[error("matrix size mismatch: {0}")]
    SizeMismatch(String),

    #[error("support function is singular at the evaluation point")]
    SingularPoint,

    #[error("integrand is not finite at a sampled point")]
    NonFiniteIntegrand,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
