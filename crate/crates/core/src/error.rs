use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into two families: input problems (`InvalidParameter`,
/// `Config`) and numerical failures (everything that can only be detected
/// while computing). The CLI maps them onto different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("boundary contamination: edge/max amplitude ratio {ratio:.3e} exceeds {limit:.1e}")]
    Boundary { ratio: f64, limit: f64 },

    #[error("time quadrature not converged: doubling nodes changed the L2 value by {change:.3e} (rtol {rtol:.1e})")]
    TimeQuadrature { change: f64, rtol: f64 },

    #[error("cost guard: {0}")]
    CostGuard(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    /// True for failures that arise during computation rather than from the
    /// inputs themselves.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature(_)
                | Error::Boundary { .. }
                | Error::TimeQuadrature { .. }
                | Error::CostGuard(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
