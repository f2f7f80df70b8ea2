//! Library surface of the `atomlens` command-line tool.
//!
//! The binary is a thin wrapper over [`commands`]; configuration
//! ingestion lives in [`config`] and the deterministic CSV/JSON artifact
//! types in [`artifact`]. Everything is exposed as a library so
//! integration tests can parse emitted artifacts back into typed values.

use std::path::PathBuf;

pub mod artifact;
pub mod commands;
pub mod config;

pub use artifact::Format;

/// CLI-level errors, each mapped to a stable process exit code:
/// configuration problems exit 2, numeric failures (brackets, solvers,
/// singular systems) exit 3, and physics-validity violations exit 4.
/// I/O problems count as environment/configuration (exit 2).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numeric failure")]
    Numeric(#[source] atomlens::Error),

    #[error("physics validity")]
    Physics(#[source] atomlens::Error),

    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numeric(_) => 3,
            CliError::Physics(_) => 4,
        }
    }
}

impl From<atomlens::Error> for CliError {
    fn from(err: atomlens::Error) -> Self {
        use atomlens::Error::*;
        match err {
            InvalidArgument(_) | ZeroDetuning => CliError::Config(err.to_string()),
            RamanNathViolation { .. } => CliError::Physics(err),
            SingularSystem { .. }
            | BracketFailure { .. }
            | DeviationNotReached { .. }
            | UndefinedAtOrigin => CliError::Numeric(err),
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CliError>;
