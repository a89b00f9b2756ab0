use thiserror::Error;

/// Errors raised by the analysis routines.
///
/// Structural problems with a recurrence are not errors; they are reported as
/// [`Violation`](crate::model::Violation)s by [`validate`](crate::model::validate).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller broke a documented precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A numerical routine did not reach its tolerance.
    #[error("numeric error: {message} (achieved error estimate {estimate:e})")]
    Numeric { message: String, estimate: f64 },

    /// The driving function has no closed-form classification.
    #[error("unsupported symbolic operation: {0}")]
    UnsupportedSymbolic(String),

    /// A perturbed argument failed to shrink below the point being evaluated.
    #[error("model error at x = {x:e}, divisor {divisor}: {message}")]
    Model {
        x: f64,
        divisor: f64,
        message: String,
    },

    /// The answer cannot be decided from the available information.
    #[error("undecidable: {0}")]
    Unknown(String),

    /// A spec file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
