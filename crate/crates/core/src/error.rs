use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The dense oracle would exceed its size limits.
    #[error("resource guard: {0}")]
    ResourceGuard(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("eigensolver did not converge within {rotations} rotations (off-diagonal norm {residual:e})")]
    NonConvergence { rotations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
