//! CLI error taxonomy mapped onto the stable exit-code contract:
//! 0 success, 2 configuration error, 3 numerical/runtime failure.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        CliError::Runtime(msg.into())
    }

    /// A core error raised while building objects from configuration.
    pub fn from_config_err(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    /// A core error raised mid-computation.
    pub fn from_runtime_err(e: impl std::fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    /// Machine-readable diagnostic for stderr.
    pub fn diagnostic(&self) -> String {
        #[derive(Serialize)]
        struct Diag<'a> {
            error: Inner<'a>,
        }
        #[derive(Serialize)]
        struct Inner<'a> {
            kind: &'a str,
            message: &'a str,
        }
        let (kind, message) = match self {
            CliError::Config(m) => ("config", m.as_str()),
            CliError::Runtime(m) => ("runtime", m.as_str()),
        };
        serde_json::to_string(&Diag {
            error: Inner { kind, message },
        })
        .unwrap_or_else(|_| format!("{{\"error\":{{\"kind\":\"{kind}\"}}}}"))
    }
}
