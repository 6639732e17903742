use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {error}", path.display())]
    Io { path: PathBuf, error: std::io::Error },

    #[error("{}line {line}: {message}", file.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default())]
    Parse { file: Option<PathBuf>, line: usize, message: String },

    #[error("{0}")]
    Validation(String),

    #[error("invalid scheme descriptor: {0}")]
    Descriptor(String),

    #[error(transparent)]
    Core(#[from] qspace_core::Error),
}

impl CliError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        CliError::Parse { file: None, line, message: message.into() }
    }

    /// Attaches a file name to parse errors.
    pub fn in_file(self, path: &std::path::Path) -> Self {
        match self {
            CliError::Parse { line, message, .. } => CliError::Parse { file: Some(path.to_path_buf()), line, message },
            other => other,
        }
    }
}
