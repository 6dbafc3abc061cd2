use std::fmt;

use ou_spectra::OuError;

/// Failure classes of the command line, one per exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input, rejected model or matrix.
    Input(String),
    /// A numerical hypothesis failed (stability, nondegeneracy, convergence).
    Numerical(String),
    /// The computation ran but at least one invariant check failed.
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Invariant(m) => write!(f, "invariant failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<OuError> for CliError {
    fn from(e: OuError) -> Self {
        let msg = match &e {
            OuError::Unstable(_) => format!("Unstable: {e}"),
            OuError::DegenerateMeasure { .. } => format!("DegenerateMeasure: {e}"),
            OuError::EigFailure => format!("EigFailure: {e}"),
            OuError::NotContraction(_) => format!("NotContraction: {e}"),
            _ => e.to_string(),
        };
        if e.is_input_error() {
            CliError::Input(msg)
        } else {
            CliError::Numerical(msg)
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
