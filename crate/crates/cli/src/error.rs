use std::fmt;

use sobolev_core::error::Error;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or input; exit code 2.
    Config(String),
    /// A numerical step failed or missed its tolerance; exit code 3.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(m) => write!(f, "configuration error: {m}"),
            Self::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::EigenNoConvergence
            | Error::FactorizationFailure { .. }
            | Error::ResidualAboveTolerance { .. }
            | Error::InsufficientExactness { .. }
            | Error::InsufficientResolution { .. } => Self::Numerical(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Config(format!("output: {e}"))
    }
}
