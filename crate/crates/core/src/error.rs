use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Caller supplied malformed data (wrong dimension, non-finite entries, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not Hermitian (defect {defect:.3e} > {tol:.1e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix trace {trace} deviates from 1 by more than {tol:.1e}")]
    NonUnitTrace { trace: f64, tol: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },

    /// Request exceeds a documented resource guard.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// Valid inputs combined in a way the operation does not support.
    #[error("usage: {0}")]
    Usage(String),

    #[error("invalid dissipator: {0}")]
    InvalidDissipator(String),

    /// A physics invariant was violated by an engine output.
    #[error("integrity: {0}")]
    Integrity(String),
}
