use std::fmt;
use std::path::PathBuf;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 1;
    pub const AUDIT_FAILURE: i32 = 2;
    pub const FOUND_FEWER: i32 = 3;
    pub const VERIFY_FAILURE: i32 = 4;
}

#[derive(Debug)]
pub enum CliError {
    UnknownFlag(String),
    InvalidFlagValue(String),
    MissingInput(String),
    MalformedFile { path: PathBuf, line: usize, message: String },
    Io { path: PathBuf, message: String },
    Core(graphpass_core::Error),
    AuditFailure(Vec<String>),
    FoundFewer { found: usize, requested: usize },
    VerificationFailed(String),
}

impl CliError {
    pub fn malformed(path: &std::path::Path, line: usize, message: impl Into<String>) -> Self {
        CliError::MalformedFile { path: path.to_path_buf(), line, message: message.into() }
    }

    pub fn io(path: &std::path::Path, err: impl fmt::Display) -> Self {
        CliError::Io { path: path.to_path_buf(), message: err.to_string() }
    }

    /// Machine-readable reason string.
    pub fn reason(&self) -> &'static str {
        match self {
            CliError::UnknownFlag(_) => "UnknownFlag",
            CliError::InvalidFlagValue(_) => "InvalidFlagValue",
            CliError::MissingInput(_) => "MissingInput",
            CliError::MalformedFile { .. } => "MalformedFile",
            CliError::Io { .. } => "Io",
            CliError::Core(e) => e.reason(),
            CliError::AuditFailure(_) => "AuditFailure",
            CliError::FoundFewer { .. } => "FoundFewer",
            CliError::VerificationFailed(_) => "VerificationFailed",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::AuditFailure(_) => exit::AUDIT_FAILURE,
            CliError::FoundFewer { .. } => exit::FOUND_FEWER,
            CliError::VerificationFailed(_) => exit::VERIFY_FAILURE,
            _ => exit::INPUT,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::UnknownFlag(s) => write!(f, "unknown flag or argument: {s}"),
            CliError::InvalidFlagValue(s) => write!(f, "invalid flag value: {s}"),
            CliError::MissingInput(s) => write!(f, "missing input: {s}"),
            CliError::MalformedFile { path, line, message } => {
                write!(f, "{}:{line}: {message}", path.display())
            }
            CliError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::AuditFailure(h) => write!(f, "audit failed for {}", h.join(", ")),
            CliError::FoundFewer { found, requested } => {
                write!(f, "found {found} energy levels, {requested} requested")
            }
            CliError::VerificationFailed(s) => write!(f, "verification failed: {s}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<graphpass_core::Error> for CliError {
    fn from(e: graphpass_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
