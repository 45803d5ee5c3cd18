use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Failures of the experiment layer. Assertion failures are not errors; they
/// are reported through [`crate::runner::RunReport::passed`].
#[derive(Debug, Error)]
pub enum LabError {
    #[error("unknown scenario `{0}` (see `collapse-lab list`)")]
    UnknownScenario(String),
    #[error("scenario `{scenario}` declares no {what} `{key}`")]
    UnknownKey { scenario: String, what: &'static str, key: String },
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    BadValue { key: String, value: String, reason: &'static str },
    #[error("malformed `{0}`, expected key=value")]
    BadPair(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}:{line}: {reason}", path.display())]
    Config { path: PathBuf, line: usize, reason: String },
    #[error(transparent)]
    Core(#[from] collapse_core::Error),
}

impl LabError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
