use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid diffusion coefficient: {0}")]
    InvalidDiffusion(String),

    #[error("invalid reaction term: {0}")]
    InvalidReaction(String),

    #[error("reaction term is inadmissible: {0}")]
    Inadmissible(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("requested {requested} modes but only {available} are available")]
    TooManyModes { requested: usize, available: usize },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("singular linear system (pivot {pivot})")]
    Singular { pivot: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite state at step {step} (t = {time}); reduce dt")]
    Blowup { step: usize, time: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}
