use std::path::{Path, PathBuf};

use hyperelastic_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },
    #[error("{path}: unsupported {what} version {found} (expected {expected})")]
    UnsupportedVersion { path: PathBuf, what: &'static str, found: u64, expected: u64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io { path: path.to_path_buf(), source }
    }

    pub fn json(path: &Path, e: &serde_json::Error) -> Self {
        Error::Parse { path: path.to_path_buf(), line: e.line(), column: e.column(), message: e.to_string() }
    }

    /// 2 configuration, 3 data, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io { .. } | Error::Parse { .. } | Error::UnsupportedVersion { .. } | Error::Data(_) => 3,
            Error::Core(e) => match e {
                CoreError::Config(_) | CoreError::Variant { .. } | CoreError::Shape { .. } => 2,
                CoreError::Dataset(_) | CoreError::Protocol(_) | CoreError::Window { .. } | CoreError::InvalidKinematics(_) => 3,
                _ => 4,
            },
        }
    }
}
