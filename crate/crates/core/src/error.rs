use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("edge {index} is empty; the empty set cannot be hit")]
    EmptyEdge { index: usize },

    #[error("element {element} out of range for ground set of size {n}")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("ground set size {0} outside 1..=1024")]
    GroundSize(usize),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("expected {mu:.6e} edges exceeds the sampling limit of 1e8")]
    InstanceTooLarge { mu: f64 },

    #[error("exhaustive search refused for n = {0} (limit 20)")]
    TooLargeForExhaustive(usize),

    #[error("trial {index} exceeded the node budget of {budget} (best known size {best})")]
    BudgetExceeded { index: u64, budget: u64, best: usize },

    #[error("enumerating C({n},{m}) subsets exceeds the limit of 1e6")]
    CountLimit { n: usize, m: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
