//! Error type shared by every module in the crate.
//!
//! Variants are grouped by what the caller can do about them: argument and
//! range errors indicate a bad call, layout errors indicate a geometry that
//! cannot host the requested antennas, numeric errors indicate a formula
//! leaving its domain of validity.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when building configurations, placing
/// antennas, or evaluating closed-form expressions.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed basic validation (wrong sign, zero where positive
    /// is required, mismatched lengths).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A coordinate or index fell outside the region the model covers.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// The waveguide geometry cannot host the requested antenna count while
    /// honoring the minimum spacing.
    #[error("infeasible layout: {0}")]
    InfeasibleLayout(String),

    /// A closed-form step left its numeric domain (negative discriminant,
    /// log of a non-positive value).
    #[error("numeric domain violation: {0}")]
    NumericDomain(String),

    /// The expression is only defined for a restricted geometry, for
    /// example an odd segment count.
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    /// A derivative was requested at a point where it does not exist.
    #[error("derivative undefined: {0}")]
    UndefinedDerivative(String),
}
