use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A distribution or model parameter violates its constraints.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A point lies outside the domain of the requested map.
    #[error("domain error: {0}")]
    Domain(String),

    /// A denominator the theory guarantees nonzero vanished.
    #[error("singularity: {0}")]
    Singularity(String),

    /// The requested transform needs an invertible weight link.
    #[error("not invertible: {0}")]
    NotInvertible(String),

    /// Arithmetic produced a non-finite value.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("empty sample")]
    EmptySample,

    /// A statistic is undefined on constant input.
    #[error("degenerate sample: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
