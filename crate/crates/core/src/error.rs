use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    #[error("norm {norm} exceeds the allowed bound {bound}")]
    NormTooLarge { norm: f64, bound: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("growth function violates F(M) > M at M = {m} (F(M) = {value})")]
    GrowthViolation { m: u64, value: f64 },

    #[error("budget exceeded: {what} requires {requested}, limit is {limit}")]
    BudgetExceeded {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    /// A multi-stage decomposition ran out of budget. `partial` holds the
    /// certificate of the stages completed so far.
    #[error("decomposition budget exhausted: {reason}")]
    BudgetExhausted {
        reason: String,
        partial: Option<Box<serde_json::Value>>,
    },

    #[error("certificate violation: {0}")]
    Certificate(String),

    /// A procedure finished but its output misses the promised guarantee.
    #[error("guarantee not met: {reason}")]
    Unmet {
        reason: String,
        diagnostics: Box<serde_json::Value>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

/// Checks `0 < eps <= 1`.
pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("eps = {eps} is outside (0, 1]")))
    }
}
