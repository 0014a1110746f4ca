//! Error taxonomy shared by every module.

/// Errors raised by library operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument fell outside an operation's domain (negative variance,
    /// non-positive cloner balance, malformed grid, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Protocol parameters that cannot carry information (alpha >= 1,
    /// i.e. no squeezing on at least one quadrature).
    #[error("unusable parameters: {0}")]
    UnusableParameters(String),

    /// Too few samples or pairs to compute the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// An operation requires a parameter regime it does not support
    /// (e.g. photon budget formulas need symmetric squeezing).
    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),

    /// Two sequences that must line up element-for-element do not.
    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    /// A serialized transcript or config could not be decoded.
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
