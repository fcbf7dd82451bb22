//! Error taxonomy mapped to process exit codes.
//!
//! Exit code 2 covers usage errors (bad flags, unknown override keys, bad
//! ranges), 3 covers configuration errors (unreadable or invalid scenario
//! files, infeasible setups), and 4 covers runtime errors (I/O failures,
//! computation errors that abort a command). Success is 0, including sweeps
//! with partial per-row failures.

use std::fmt;

// ---- error type ----

/// A command failure carrying its exit class.
#[derive(Debug)]
pub enum CliError {
    /// Malformed invocation: flags, override keys, ranges, env values.
    Usage(String),
    /// Unusable scenario: file errors, failed validation, infeasible setup.
    Config(String),
    /// Failure while executing an otherwise valid command.
    Runtime(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }

    /// Stable class name used in the machine-readable error record.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Runtime(_) => "runtime",
        }
    }

    /// Human-readable message.
    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(text) | CliError::Config(text) | CliError::Runtime(text) => text,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}
