use thiserror::Error;

/// Errors raised by quadric construction, projection, splitting and benchmarking.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    AsymmetricMatrix { asymmetry: f64 },

    #[error("matrix is singular (min |eigenvalue| {min_abs:e}, max |eigenvalue| {max_abs:e})")]
    SingularMatrix { min_abs: f64, max_abs: f64 },

    #[error("the center of the quadric lies on the quadric (gamma = {gamma:e})")]
    CenterOnQuadric { gamma: f64 },

    #[error("the quadric is empty: no positive eigenvalue in standard form")]
    EmptyQuadric,

    #[error("secular function evaluated at a pole (mu = {mu})")]
    PoleEvaluation { mu: f64 },

    #[error("root finder did not converge after {iterations} iterations (best mu = {best}, |f| = {residual:e})")]
    NoConvergence { best: f64, residual: f64, iterations: usize },

    #[error("no starting point with positive secular value found")]
    NotFound,

    #[error("no projection candidate found")]
    NoCandidate,

    #[error("line direction is zero")]
    ZeroDirection,

    #[error("point coincides with the center of the quadric")]
    AtCenter,

    #[error("gradient of the quadratic vanishes at the point")]
    ZeroGradient,

    #[error("invalid step size gamma = {0}: must be positive")]
    InvalidGamma(f64),

    #[error("invalid box: lower bound exceeds upper bound at index {index}")]
    InvalidBox { index: usize },

    #[error("blocks do not partition the coordinates: {0}")]
    InvalidPartition(String),

    #[error("instance generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
