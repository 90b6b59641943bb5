use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: u64, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: mixgraph::Error,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Undefined(String),
}

impl CliError {
    pub fn parse(path: &Path, line: u64, message: impl Into<String>) -> Self {
        Self::Parse { path: path.display().to_string(), line, message: message.into() }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.display().to_string(), source }
    }

    /// 2 for quantities that are undefined on the given input, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Undefined(_) => 2,
            Self::Core { source, .. } if source.is_undefined_quantity() => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> CliResult<T>;
}

impl<T> Context<T> for mixgraph::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> CliResult<T> {
        self.map_err(|source| CliError::Core { context: what(), source })
    }
}
