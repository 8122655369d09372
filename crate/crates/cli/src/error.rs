use std::fmt;
use std::process::ExitCode;

/// Failure of a subcommand, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    /// Invalid parameters (exit 2). The message names the offending flag.
    Usage(String),
    /// I/O or other runtime failure (exit 1).
    Io(String),
}

impl CliError {
    pub fn usage(flag: &str, reason: impl fmt::Display) -> Self {
        CliError::Usage(format!("invalid value for --{flag}: {reason}"))
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Io(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<triplewalk::Error> for CliError {
    fn from(e: triplewalk::Error) -> Self {
        match e {
            triplewalk::Error::InvalidParameter { name, reason } => CliError::usage(name, reason),
            // every other core failure stems from the requested parameters
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
