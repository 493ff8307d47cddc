#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] comptrack_core::Error),
    /// An error reported by the server, carried through unchanged.
    #[error("{message}")]
    Remote { code: String, message: String },
    #[error("{0}")]
    Transport(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn code(&self) -> &str {
        match self {
            CliError::Domain(e) => e.code(),
            CliError::Remote { code, .. } => code,
            CliError::Transport(_) => "transport.error",
            CliError::Io(_) => "io.error",
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
