//! Crate-wide error type.

/// Errors reported by estimators, fitters and generators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter failed validation (non-positive scale, balance weights not
    /// summing to one, truncation order of zero, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input data lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Too few observations for the estimator's minimum requirements.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Series lengths do not agree where they must.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// The operation needs a regularly varying family but got one without a
    /// tail index (Weibull).
    #[error("not regularly varying: {0}")]
    NotRegularlyVarying(String),

    /// A denominator or variance collapsed to zero.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A conditional probability has an empty conditioning event.
    #[error("undefined conditional: {0}")]
    UndefinedConditional(String),

    /// Configuration-level problem (plan too short, unknown column, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Iterative optimisation ran out of iterations; carries the last iterate.
    #[error("optimization failed after {iterations} iterations (last iterate {last:?}): {message}")]
    OptimizationFailed {
        iterations: usize,
        last: Vec<f64>,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
