use std::fmt;
use std::process::ExitCode;

/// Failure of a subcommand, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config, spec or input file. Exit 2.
    Input(String),
    /// Integration aborted on an invariant breach. Exit 3.
    Invariant(String),
    /// One or more audited properties failed. Exit 1.
    VerifyFailed,
    /// Could not write results. Exit 1.
    Output(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Input(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::VerifyFailed | CliError::Output(_) => 1,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Invariant(m) => write!(f, "integration aborted: {m}"),
            CliError::VerifyFailed => f.write_str("audit failed"),
            CliError::Output(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<sasmag::Error> for CliError {
    fn from(e: sasmag::Error) -> Self {
        match e {
            sasmag::Error::InvariantBreach { .. } => CliError::Invariant(e.to_string()),
            sasmag::Error::Io(io) => CliError::Output(io.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
