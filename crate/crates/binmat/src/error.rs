use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected d={expected}, got d={got}")]
    DimensionMismatch { expected: u32, got: u32 },

    #[error("dimension {dim} outside supported range 1..={max}")]
    DimensionOutOfRange { dim: u32, max: u32 },

    #[error("guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed reduction: {0}")]
    MalformedReduction(String),

    /// A paper-guaranteed property failed on input that was certified to
    /// satisfy its premises; this always indicates an implementation bug.
    #[error("integrity failure: {0}")]
    IntegrityFailure(String),

    #[error("mapping produced an invalid reduction: {0}")]
    InvalidMapping(String),
}

pub type Result<T> = std::result::Result<T, Error>;
