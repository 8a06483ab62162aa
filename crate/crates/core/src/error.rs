//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by the library operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Mismatched shapes: different alphabet sizes, degree caps or matrix dimensions.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// A series with zero constant term has no multiplicative inverse.
    #[error("series is not invertible: constant term is zero")]
    NotInvertible,
    /// Substitution arguments must have zero constant term.
    #[error("substitution argument {index} has nonzero constant term")]
    Substitution { index: usize },
    /// Compositional inversion is only supported for identity linear part.
    #[error("compositional inverse requires identity linear part: {0}")]
    LinearPart(String),
    /// A size argument is outside the supported range.
    #[error("size out of range: {0}")]
    Size(String),
    /// A word is too long for the available Fock depth.
    #[error("insufficient Fock depth: {0}")]
    Depth(String),
    /// A stated precondition does not hold for the given input.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An argument is outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A document or text value failed to parse or validate.
    #[error("invalid input: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
