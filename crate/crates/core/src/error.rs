use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Variants are grouped loosely by the layer that produces them; the CLI maps
/// each one onto an exit code (see [`Error::exit_code`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("value is not in D[sqrt2]: {0}")]
    NotInRing(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("matrix is not special orthogonal: {0}")]
    NotOrthogonal(String),
    #[error("unitary is not a matchgate: {0}")]
    NotMatchgate(String),
    #[error("not a valid covariance matrix: {0}")]
    NotCovariance(String),
    #[error("index out of range: {0}")]
    Range(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{n} qubits exceeds the dense-simulation cap of {cap}")]
    Cap { n: usize, cap: usize },
    #[error("state is not normalized (norm deviation {0:e})")]
    Normalization(f64),
    #[error("matrix has determinant -1")]
    Reflection,
    #[error("word search exhausted (table cap {cap}, best error {best:e})")]
    SearchExhausted { cap: usize, best: f64 },
    #[error("instance too large: {0}")]
    Capacity(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("solver process failed: {0}")]
    SolverProcess(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("value does not fit in a double")]
    Overflow,
    #[error("unsupported size {0}")]
    UnsupportedSize(usize),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the `mgs` binary.
    ///
    /// 1 I/O, 2 domain, 3 unknown/timeout, 5 search exhausted. Code 4 (UNSAT
    /// as an answer) is not an error and is produced by the CLI directly.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Json(_) | Error::Parse(_) => 1,
            Error::SearchExhausted { .. } => 5,
            Error::SolverProcess(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
