use thiserror::Error;

use crate::scenario::Diagnostics;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} is outside its domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    #[error("method {method} is not available for the {link} link")]
    MethodUnavailable { method: &'static str, link: &'static str },

    #[error("effective capacities computed at different QoS exponents ({left:e} vs {right:e})")]
    ThetaMismatch { left: f64, right: f64 },

    #[error("insufficient tail mass for exponent fit: {0}")]
    InsufficientTail(String),

    #[error("queue simulation failed: {0}")]
    Queue(String),

    #[error("invalid configuration:\n{0}")]
    Config(Diagnostics),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
