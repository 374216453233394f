use std::fmt;

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad config or arguments (exit 2).
    Validation(String),
    /// Numerical or runtime failure (exit 3).
    Numeric(String),
    /// Convergence audit above threshold (exit 4).
    Drift(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        CliError::Numeric(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Drift(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Drift(m) => write!(f, "convergence audit failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qpgen_core::Error> for CliError {
    fn from(e: qpgen_core::Error) -> Self {
        if e.is_validation() || matches!(e, qpgen_core::Error::Resource(_)) {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numeric(format!("i/o: {e}"))
    }
}
