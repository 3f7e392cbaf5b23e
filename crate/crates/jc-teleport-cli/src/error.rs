use jc_teleport::Error;

/// Failure classes aligned with the process exit codes: validation
/// problems exit 1, numeric failures exit 2, I/O failures exit 3.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    /// Wraps a library error, tagging it with the grid point (or other
    /// context) at which it surfaced.
    pub fn from_core(err: Error, context: &str) -> Self {
        let msg = format!("{context}: {err}");
        match err {
            Error::InvalidParameter(_)
            | Error::DimensionMismatch { .. }
            | Error::Unsupported(_)
            | Error::OutsideDomain { .. } => CliError::Validation(msg),
            Error::NotHermitian { .. }
            | Error::NoConvergence { .. }
            | Error::DegenerateTrace { .. }
            | Error::NormUnderflow
            | Error::NegativeProbability(_)
            | Error::DegenerateSpectrum { .. } => CliError::Numeric(msg),
        }
    }

    pub fn from_io(err: std::io::Error, path: &std::path::Path) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}
