use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("relative momentum q = {0} is outside the incoming domain q > 0")]
    NonPositiveMomentum(f64),

    #[error("transfer matrices built at different momenta ({0} vs {1})")]
    MomentumMismatch(f64, f64),

    #[error("amplitudes are not unitary: |t|^2 + |r|^2 - 1 = {0:e}")]
    NonUnitary(f64),

    #[error("non-finite wave function sample at (p1, p2) = ({p1}, {p2})")]
    NonFiniteSample { p1: f64, p2: f64 },

    #[error("wave function vanishes on the grid")]
    ZeroWavefunction,

    #[error("eigendecomposition failed: {0}")]
    Spectral(String),

    #[error("{0} requires a double delta potential")]
    WrongPotential(&'static str),

    #[error("config error at `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { field: field.into(), reason: reason.into() }
    }
}
