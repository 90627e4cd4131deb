//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed vertex, placement, schedule or parameter.
    #[error("input error: {0}")]
    Input(String),
    /// The request is well formed but exceeds what this implementation enumerates.
    #[error("capability error: {0}")]
    Capability(String),
    /// An algorithm broke the engine contract (e.g. offered a non-neighbor).
    #[error("contract violation: {0}")]
    Contract(String),
    /// Initial configuration belongs to the ungatherable set of the algorithm.
    #[error("ungatherable initial configuration: {0}")]
    Ungatherable(String),
    /// A move-table synthesis found a class with no admissible move.
    #[error("synthesis error: {0}")]
    Synthesis(String),
    /// A move table failed one of its certificate clauses.
    #[error("certification error: {0}")]
    Certification(String),
    /// Caller used an operation outside its domain.
    #[error("misuse: {0}")]
    Misuse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
