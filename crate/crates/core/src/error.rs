use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Mismatched dimensions, state sets, or otherwise malformed input.
    #[error("structural error: {0}")]
    Structural(String),

    /// An input object violates one of its documented invariants.
    #[error("validation error: invariant `{invariant}` violated: {detail}")]
    Validation { invariant: &'static str, detail: String },

    /// The requested computation exceeds the configured work budget.
    #[error("budget exceeded: {what} needs {needed} work units, limit is {limit}")]
    BudgetExceeded { what: String, needed: u128, limit: u128 },

    /// A post-hoc certificate check failed. Indicates a bug, never bad input.
    #[error("internal consistency error: {0}")]
    Certification(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn validation(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Validation { invariant, detail: detail.into() }
    }
}
