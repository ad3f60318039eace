use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A model or sampler parameter is outside its valid domain.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// A function was evaluated outside of its support.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature hit its subdivision budget before reaching tolerance.
    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:e}, error bound {error_bound:e})")]
    Quadrature {
        estimate: f64,
        error_bound: f64,
        subdivisions: usize,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The network configuration makes a requested quantity meaningless,
    /// e.g. a zero low-frequency spectral efficiency in the SE ratio.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {value}")))
    }
}
