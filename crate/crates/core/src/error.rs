use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain where the quantity is defined.
    #[error("domain error: {param} = {value}: {reason}")]
    Domain {
        param: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("quadrature did not converge on [{lo}, {hi}]: estimate {estimate:e}, error {error:e}")]
    NonConvergence {
        lo: f64,
        hi: f64,
        estimate: f64,
        error: f64,
    },

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("ciphertext does not belong to this backend instance")]
    BackendMismatch,

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn domain(param: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            param,
            value,
            reason,
        }
    }
}
