use std::path::PathBuf;

/// Failures of the lab layer: files, parsing, and everything the core
/// reports.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{what}, line {line}: {msg}")]
    Parse { what: String, line: usize, msg: String },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] conflimit_core::Error),
    #[error("{context}: {source}")]
    Context { context: String, source: conflimit_core::Error },
}

impl LabError {
    /// Process exit code: 3 for numeric failures, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Core(e) | LabError::Context { source: e, .. } if e.is_numeric() => 3,
            _ => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> LabError {
        LabError::Io { path: path.into(), source }
    }
}

pub type LabResult<T> = std::result::Result<T, LabError>;

/// Attaches context to a core error.
pub trait CoreContext<T> {
    fn context(self, f: impl FnOnce() -> String) -> LabResult<T>;
}

impl<T> CoreContext<T> for conflimit_core::Result<T> {
    fn context(self, f: impl FnOnce() -> String) -> LabResult<T> {
        self.map_err(|source| LabError::Context { context: f(), source })
    }
}
