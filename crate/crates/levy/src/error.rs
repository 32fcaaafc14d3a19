//! Crate error type.

use thiserror::Error;

/// A named violation of a model parameter constraint.
///
/// `parameter` is the offending parameter name as spelled in the model
/// constructor; `message` states the constraint and the observed value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintViolation {
    pub parameter: String,
    pub message: String,
}

impl std::fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.parameter, self.message)
    }
}

fn join_violations(vs: &[ConstraintViolation]) -> String {
    vs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Errors produced by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LevyError {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Model parameters violate one or more constraints.
    #[error("invalid parameters: {}", join_violations(.0))]
    InvalidParams(Vec<ConstraintViolation>),

    /// The requested quantity has no tractable form for this model.
    #[error("not available: {0}")]
    NotAvailable(String),

    /// A rejection sampler exceeded its iteration budget.
    #[error("sampler failed to converge: {0}")]
    SamplerStalled(String),

    /// A statistical routine was handed an unusable sample.
    #[error("bad sample: {0}")]
    BadSample(String),
}

impl LevyError {
    /// Convenience constructor for a single-violation parameter error.
    pub fn invalid(parameter: &str, message: impl Into<String>) -> Self {
        LevyError::InvalidParams(vec![ConstraintViolation {
            parameter: parameter.to_string(),
            message: message.into(),
        }])
    }
}
