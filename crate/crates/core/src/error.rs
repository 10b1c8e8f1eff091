use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right} vertices")]
    Dimension { left: usize, right: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("delta is undefined for a graph with n = {n}, m = {m}")]
    Normalization { n: usize, m: usize },

    #[error("enumeration of {count} permutations exceeds budget {budget}; use the heuristic search")]
    BudgetExceeded { count: BigUint, budget: u64 },

    #[error("profile was computed for a different graph")]
    FingerprintMismatch,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
