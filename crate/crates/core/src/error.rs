use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {0} is not an odd prime; the cyclic MUB construction needs d odd prime (d >= 3)")]
    InvalidDimension(u64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("expected {expected} shares, got {got}")]
    ShareCount { expected: usize, got: usize },

    #[error("joint outcome table needs {0} entries, over the 10^6 budget")]
    MemoryGuard(u128),

    #[error("round {0} is not valid")]
    InvalidRound(usize),

    #[error("unknown attack kind `{0}`")]
    UnknownAttack(String),

    #[error("link {link} outside 1..={max}")]
    LinkOutOfRange { link: usize, max: usize },

    #[error("link {0} already carries a tap")]
    DuplicateTap(usize),

    #[error("repeated abscissa {0}")]
    RepeatedAbscissa(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),
}
