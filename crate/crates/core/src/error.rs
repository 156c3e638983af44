use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("malformed presentation: {0}")]
    MalformedPresentation(String),
    #[error("curve has a base point")]
    BasePointed,
    #[error("pulled-back map is not of constant rank on P1")]
    NotCertified,
    #[error("splitting window inconsistent: {0}")]
    WindowInconsistent(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("expected a rank 2 sheaf, got rank {0}")]
    NotRankTwo(i64),
    #[error("selected submatrix is singular")]
    SingularSelection,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
