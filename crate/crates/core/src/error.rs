use thiserror::Error;

/// Errors raised by the laboratory's numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    /// A parameter violates an operation's precondition. `field` names the
    /// offending parameter so diagnostics can point at it.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// The closed-form tail integral diverges (`s * p <= 1`).
    #[error("divergent tail: decay {decay} with exponent p = {p} is not integrable")]
    DivergentTail { p: f64, decay: f64 },

    #[error("empty family: {0}")]
    EmptyFamily(&'static str),

    /// A set or function does not intersect the grid support.
    #[error("set [{lo}, {hi}] does not meet the grid support")]
    OutsideSupport { lo: f64, hi: f64 },

    #[error("fit requires at least {needed} admissible samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> LabError {
    LabError::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
