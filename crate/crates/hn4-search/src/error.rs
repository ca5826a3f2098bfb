//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Vertex 0 is the special loop vertex and carries no `(k1, k2)` label.
    #[error("vertex 0 has no (k1, k2) factorization; it is the special loop vertex")]
    NoFactorization,

    /// A parameter lies outside its valid domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The probability series has no usable first peak.
    #[error("no peak found: {0}")]
    NoPeak(String),

    /// A run would touch more amplitude cells than the configured budget.
    #[error("resource budget exceeded: run needs {cells} amplitude-step cells, budget is {budget}")]
    ResourceBudget { cells: u128, budget: u128 },

    /// Malformed input table.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
