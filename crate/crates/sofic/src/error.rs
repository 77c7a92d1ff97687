use thiserror::Error;

/// Crate-wide error type.
///
/// Verification failures (a witness that isn't one, a set that isn't Følner)
/// are ordinary `Err` values, not panics: callers routinely probe objects
/// that are *expected* to fail.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("unknown generator `{0}`")]
    BadGenerator(String),

    #[error("{what} = {got} exceeds cap {cap}")]
    CapExceeded { what: &'static str, got: u64, cap: u64 },

    #[error("cycle types differ: {0}")]
    CycleTypeMismatch(String),

    #[error("bad cycle distribution: {0}")]
    BadDistribution(String),

    #[error("marked groups have different generator lists: {0}")]
    MarkingMismatch(String),

    #[error("witness rejected: {0}")]
    BadWitness(String),

    #[error("involution violated: {0}")]
    Involution(String),

    #[error("missing entry: {0}")]
    MissingEntry(String),

    #[error("good-set condition violated: {0}")]
    GoodSet(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric at ({0},{1})")]
    NotSymmetric(usize, usize),

    #[error("matrix is not positive semidefinite")]
    NotPsd,

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("search failed: {0}")]
    Infeasible(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("bad argument: {0}")]
    BadArgument(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
