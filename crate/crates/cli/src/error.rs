use std::io;
use std::path::PathBuf;

use nsot_core::ErrorKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] nsot_core::Error),

    #[error("{field}: cannot read {}: {source}", path.display())]
    Read { field: String, path: PathBuf, source: io::Error },

    #[error("{field}: {message}")]
    Invalid { field: String, message: String },

    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn invalid(field: &str, message: impl Into<String>) -> Self {
        CliError::Invalid { field: field.to_string(), message: message.into() }
    }

    /// 2 for validation, structural and I/O failures, 3 for domain, 4 for resource.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Validation | ErrorKind::Structural => 2,
                ErrorKind::Domain => 3,
                ErrorKind::Resource => 4,
            },
            CliError::Read { .. } | CliError::Invalid { .. } | CliError::Write { .. } => 2,
        }
    }
}
