use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("observable must not depend on momentum: {0}")]
    MomentumDependence(String),

    #[error("non-finite state encountered at s = {at}")]
    NonFinite { at: f64 },

    #[error("boundary-value problem failed for x = {x:?}, x' = {x_prime:?}, t = {t}: {reason}")]
    BoundaryValue {
        x: Vec<f64>,
        x_prime: Vec<f64>,
        t: f64,
        reason: String,
    },

    #[error("grid mismatch between kernel and wavefunction")]
    GridMismatch,

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
