use std::io;
use std::path::PathBuf;

pub type Result<T, E = LidError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum LidError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Core(#[from] lidkit_core::Error),
    #[error("not a model bundle (bad magic)")]
    BadMagic,
    #[error("unsupported bundle format version {0}")]
    UnsupportedVersion(String),
    #[error("corrupt bundle section [{section}] at line {line}: {message}")]
    CorruptTable {
        section: String,
        line: usize,
        message: String,
    },
    #[error("line {line}: {message}")]
    Corpus { line: usize, message: String },
    #[error("{0}")]
    Report(String),
}

impl LidError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        LidError::Io {
            path: path.into(),
            source,
        }
    }
}
