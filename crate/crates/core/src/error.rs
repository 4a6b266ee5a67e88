use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Inconsistent model or value-module data.
    #[error("configuration error: {0}")]
    Config(String),
    /// An operation was called outside its domain.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A solver could not produce an answer for otherwise valid input.
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
