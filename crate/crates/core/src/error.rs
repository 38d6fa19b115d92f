use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("degenerate point set: {0}")]
    Degenerate(String),

    #[error("integration blew up at step {step}")]
    Integration { step: usize },

    #[error("malformed filtration: {0}")]
    Structural(String),

    #[error("unsupported homology degree {0}; only k >= 1 is analysed")]
    UnsupportedDegree(usize),

    #[error("value outside domain: {0}")]
    Domain(String),

    #[error("diagram has {0} infinite pair(s); resolve them with inference::threshold_search first")]
    InfinitePairs(usize),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("threshold search did not terminate: {0}")]
    NonTermination(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
