use thiserror::Error;

/// Errors surfaced by the lab's operations.
///
/// Precondition violations and budget overruns are kept distinct so callers
/// (in particular the CLI) can map them to different exit statuses.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A tensor-valued computation would exceed the configured cell budget.
    #[error("compute budget exceeded: operation needs {needed} tensor cells, budget allows {max}")]
    Budget { needed: u128, max: u128 },

    /// A measure/set specification could not be parsed.
    #[error("bad input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
