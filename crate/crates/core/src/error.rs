use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model or operation parameter violates its bound. `name` is the
    /// parameter's short name (`n`, `s`, `l`, `j`, `start`, ...).
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("energy {z} lies on (or within tolerance of) the spectrum")]
    OnSpectrum { z: String },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("degenerate partition: {0}")]
    DegeneratePartition(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("z0 = {z0} is not a root of <l|g0|l> (value {value:e})")]
    NotARoot { z0: f64, value: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
