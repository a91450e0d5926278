use std::fmt;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Mismatch(String),
    Resource(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Validation(_) | CliError::Io(_) => ExitCode::from(1),
            CliError::Mismatch(_) => ExitCode::from(2),
            CliError::Resource(_) => ExitCode::from(3),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Mismatch(m) => write!(f, "verification failed: {m}"),
            CliError::Resource(m) => write!(f, "resource limit: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<permutent::Error> for CliError {
    fn from(e: permutent::Error) -> Self {
        match e {
            permutent::Error::ResourceGuard(_) => CliError::Resource(e.to_string()),
            permutent::Error::NonConvergence { .. } => CliError::Mismatch(e.to_string()),
            permutent::Error::Io(m) => CliError::Io(m),
            permutent::Error::Domain(m) => CliError::Validation(m),
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
