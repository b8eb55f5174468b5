use thiserror::Error;

/// Errors raised by the workbench.
///
/// The CLI maps [`Error::Param`] and [`Error::Io`]/[`Error::Parse`] to exit
/// status 1 and [`Error::Degenerate`] to exit status 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("refusing exhaustive search over {0} anchors (limit {1})")]
    TooLarge(usize, usize),

    #[error("regression failed: {0}")]
    Fit(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Param(msg.into()))
}
