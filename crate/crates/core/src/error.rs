use thiserror::Error;

/// Errors produced by the matching library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot parse input: {0}")]
    Parse(String),

    #[error("invalid market: {0}")]
    InvalidMarket(String),

    #[error("invalid preference: {0}")]
    InvalidPreference(String),

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("invalid technology tree: {0}")]
    InvalidTree(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("{what}: enumeration budget exceeded ({required} > {limit})")]
    BudgetExceeded {
        what: &'static str,
        required: u128,
        limit: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("stable matching search exhausted after {attempts} candidate(s)")]
    SearchExhausted { attempts: usize },

    #[error("linear system is infeasible")]
    Infeasible,

    #[error("vector is not integral: {0}")]
    NonIntegral(String),

    #[error("internal invariant failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
