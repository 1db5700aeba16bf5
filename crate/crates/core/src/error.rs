use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{what}: enumeration budget exceeded (needs {needed}, limit {limit})")]
    Budget {
        what: &'static str,
        needed: u128,
        limit: u128,
    },
    #[error("invalid group table: {0}")]
    InvalidTable(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("maps do not compose: {0}")]
    Mismatch(String),
    #[error("diagram has no node for {0}")]
    MissingNode(String),
    #[error("parse error at position {pos}: expected {expected}, found {found}")]
    Parse {
        pos: usize,
        expected: String,
        found: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
