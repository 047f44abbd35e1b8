use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested method is not available for this network model.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An integral or iteration failed to reach its tolerance.
    #[error("numerical convergence failure in {context}: estimate {value:e}, error {abs_err:e} after {iterations} steps")]
    Convergence {
        context: String,
        value: f64,
        abs_err: f64,
        iterations: usize,
    },

    /// Simulation configuration is inconsistent with the model.
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
