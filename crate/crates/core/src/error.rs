use thiserror::Error;

/// Error type shared by all modules.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A vertex or symbol lies outside the declared domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A run-time budget was exhausted before the operation finished.
    /// Callers that cap exploration catch this and mark the result truncated.
    #[error("budget exhausted after {steps} steps")]
    BudgetExhausted { steps: u64 },

    /// An argument violates a precondition (empty start set, bad window size, ...).
    #[error("argument error: {0}")]
    Argument(String),

    /// Malformed input sequence or file.
    #[error("input error: {0}")]
    Input(String),

    /// A configuration cannot be satisfied (space budget below minimum, ...).
    #[error("configuration error: {0}")]
    Config(String),
}
