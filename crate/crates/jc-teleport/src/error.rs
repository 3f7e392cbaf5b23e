use thiserror::Error;

/// Crate-wide error type. Validation problems are reported before any
/// numerics run; numeric failures carry the residual that tripped them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("eigensolver did not converge in {sweeps} sweeps (off-diagonal residual {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("trace {trace:.3e} is below the normalization floor")]
    DegenerateTrace { trace: f64 },

    #[error("channel normalization underflow")]
    NormUnderflow,

    #[error("Bell outcome probability {0:.3e} is negative beyond tolerance")]
    NegativeProbability(f64),

    #[error("eigenvalue gap {gap:.3e} too small for the spectral QFI formula; use the matrix form")]
    DegenerateSpectrum { gap: f64 },

    #[error("parameter {xi} outside family domain [{lo}, {hi}]")]
    OutsideDomain { xi: f64, lo: f64, hi: f64 },

    #[error("unsupported: {0}")]
    Unsupported(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
