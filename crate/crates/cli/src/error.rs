use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or configuration.
    #[error("{0}")]
    Usage(String),

    /// A computed check did not hold; results were still written.
    #[error("{0}")]
    Check(String),

    #[error(transparent)]
    Engine(#[from] lossqfi_core::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Check(_) | CliError::Engine(_) | CliError::Io { .. } => 1,
        }
    }
}
