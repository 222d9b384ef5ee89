use thiserror::Error;

/// Errors surfaced by the classification library.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix that was required to be invertible is singular.
    #[error("matrix is singular")]
    Singular,

    /// A characteristic polynomial does not split over Q(i); classification
    /// is refused rather than approximated.
    #[error("eigenvalue outside Q(i): {0}")]
    EigenvalueOutsideField(String),

    /// Input bytes do not conform to the expected schema.
    #[error("malformed input: {0}")]
    MalformedInput(String),

    /// Matrix dimensions are inconsistent.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Requested dimensions fall outside the supported range.
    #[error("dimension out of range: {0}")]
    DimensionOutOfRange(String),

    /// Instantiation parameters collide with pinned points or each other.
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    /// The reduction exposed a configuration outside the implemented case
    /// table. This indicates a bug, not a user error.
    #[error("unsupported structure: {0}")]
    UnsupportedStructure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
