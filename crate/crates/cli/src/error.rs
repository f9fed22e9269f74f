use hardy_core::error::HardyError;

/// Command failures, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, files or parameters: exit code 2.
    Validation(String),
    /// A solver failed or the input is too degenerate: exit code 3.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<HardyError> for CliError {
    fn from(e: HardyError) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}
