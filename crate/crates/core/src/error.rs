use thiserror::Error;

/// Errors produced anywhere in the sampler stack.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed DIMACS input. `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A caller broke an operation's precondition (bad argument, arity
    /// mismatch, tolerance out of range, partial assignment, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A solver call ran out of its wall-clock budget.
    #[error("solver budget exhausted")]
    Timeout,

    /// Exact enumeration refused because the sampling set is too wide.
    #[error("exact enumeration refused: {width} sampling variables exceeds the limit of {limit}")]
    GuardExceeded { width: usize, limit: usize },

    /// The approximate counter could not produce an estimate.
    #[error("approximate counting failed: {0}")]
    CountingFailed(String),

    /// A persisted presample state does not match the current inputs.
    #[error("presample state rejected: {0}")]
    State(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
