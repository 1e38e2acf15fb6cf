use std::fmt;
use std::process::ExitCode;

/// Why a command stopped. Input problems exit with 2, failed checks with 1.
#[derive(Debug)]
pub enum Failure {
    Input { path: String, message: String },
    Check(String),
}

impl Failure {
    pub fn input(path: &str, message: impl Into<String>) -> Self {
        Failure::Input {
            path: path.to_string(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Input { .. } => ExitCode::from(2),
            Failure::Check(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input { path, message } if path.is_empty() => write!(f, "invalid input: {message}"),
            Failure::Input { path, message } => write!(f, "invalid input at `{path}`: {message}"),
            Failure::Check(message) => write!(f, "check failed: {message}"),
        }
    }
}
