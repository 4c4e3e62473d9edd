use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: the Fock cutoff must be at least 1")]
    InvalidDimension(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cutoff overflow: neglected population {tail:.3e} exceeds tolerance {tol:.1e} at cap D={cap}")]
    CutoffOverflow { cap: usize, tail: f64, tol: f64 },

    #[error("parameter outside domain: {0}")]
    Domain(String),

    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}
