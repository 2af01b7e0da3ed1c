use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("near-singular system, condition estimate {cond:.3e}")]
    NearSingular { cond: f64 },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("missing lattice data at {point:?}")]
    MissingData { point: Vec<i64> },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("structural mismatch: {0}")]
    StructuralMismatch(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
