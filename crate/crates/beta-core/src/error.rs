use thiserror::Error;

/// Failure modes shared by every module in this crate.
///
/// The variants are coarse on purpose: callers branch on the kind of failure
/// (capacity vs. bad input vs. numeric trouble), not on exact messages.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A requested dimension or index product exceeds the configured cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Inputs are shaped correctly but lie outside an operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Vectors or matrices with incompatible dimensions were combined.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An input collapsed to (numerical) zero where a nonzero object is required.
    #[error("degenerate input: {0}")]
    Degeneracy(String),

    /// A program, system description, or trajectory failed structural checks.
    #[error("validation error: {0}")]
    Validation(String),

    /// An iterative routine exhausted its budget or produced non-finite values.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A value could not be decoded as the basis-state encoding it claims to be.
    #[error("encoding error: {0}")]
    Encoding(String),
}

pub type Result<T> = std::result::Result<T, Error>;
