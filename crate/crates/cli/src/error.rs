use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failure of a CLI command. Every variant maps to exit status 1; usage
/// errors are reported by clap with status 2 before a command runs.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Input { path: PathBuf, source: chorimap_core::Error },

    #[error(transparent)]
    Core(#[from] chorimap_core::Error),

    #[error("configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Usage(String),

    #[error("server: {0}")]
    Server(std::io::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_owned(), source }
    }

    pub fn input(path: &Path, source: chorimap_core::Error) -> Self {
        CliError::Input { path: path.to_owned(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}
