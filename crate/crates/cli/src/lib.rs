//! Command-line and HTTP front end for `chorimap-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod service;

pub use config::WorkspaceConfig;
pub use error::CliError;
pub use service::{router, AppState};
