use std::process::ExitCode;

use serde::Serialize;

/// Exit-code classes of the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Verification,
    Schema,
    Dimension,
    Precondition,
}

impl ErrorKind {
    pub fn exit_code(self) -> u8 {
        match self {
            ErrorKind::Verification => 1,
            ErrorKind::Schema => 2,
            ErrorKind::Dimension => 3,
            ErrorKind::Precondition => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into() }
    }

    pub fn schema(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Schema, message)
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Precondition, message)
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.kind.exit_code())
    }

    /// Single-line JSON for stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Wire<'a> {
            error: ErrorKind,
            exit_code: u8,
            message: &'a str,
        }
        let wire = Wire { error: self.kind, exit_code: self.kind.exit_code(), message: &self.message };
        serde_json::to_string(&wire).unwrap_or_else(|_| String::from("{\"error\":\"internal\"}"))
    }
}

impl From<fock_core::Error> for CliError {
    fn from(e: fock_core::Error) -> Self {
        let kind = match e {
            fock_core::Error::DimensionMismatch { .. } => ErrorKind::Dimension,
            _ => ErrorKind::Precondition,
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::schema(format!("i/o error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
