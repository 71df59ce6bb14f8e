//! CLI error taxonomy with stable exit codes.

use thiserror::Error;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("artifact error: {0}")]
    Artifact(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Transport(_) => 3,
            CliError::Artifact(_) => 4,
            CliError::Other(_) => 1,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn artifact(msg: impl Into<String>) -> Self {
        CliError::Artifact(msg.into())
    }
}

impl From<socsim_core::Error> for CliError {
    fn from(e: socsim_core::Error) -> Self {
        use socsim_core::Error as E;
        match e {
            E::Config(m) => CliError::Config(m),
            E::Transport(m) => CliError::Transport(m),
            E::Artifact(m) => CliError::Artifact(m),
            E::Io(io) => CliError::Artifact(io.to_string()),
            E::Json(j) => CliError::Artifact(j.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Artifact(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Artifact(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Artifact(e.to_string())
    }
}
