use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point has non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("point must have at least one coordinate")]
    EmptyPoint,

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The limiting witnesses are a non-exhaustive sample and no closed form
    /// of the convex hull is known at this point.
    #[error("hull undecidable: limiting subdifferential is only sampled at this point")]
    HullUndecidable,

    #[error("oracle has no argmin descriptor")]
    MissingArgmin,

    #[error("oracle returned an empty subgradient sample")]
    EmptyWitnessSet,

    #[error("usage: {0}")]
    Usage(String),
}
