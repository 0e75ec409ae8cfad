use std::fmt;

/// Command failure, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments (exit code 2).
    Config(String),
    /// Failure inside the numerical pipeline or while writing results (exit code 3).
    Run(schurscape::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(e) if e.is_config_error() => 2,
            CliError::Run(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<schurscape::Error> for CliError {
    fn from(e: schurscape::Error) -> Self {
        CliError::Run(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(e.into())
    }
}
