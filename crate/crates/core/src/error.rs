use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponents: {0}")]
    InvalidExponents(String),

    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("operation requires a real-valued symbol")]
    NonReal,

    #[error("operation requires a derivative evaluator")]
    MissingDerivative,

    #[error("operation requires a symbol declared to vanish at infinity")]
    DecayNotDeclared,

    #[error("singularity at {location} with exponent {exponent} is not integrable")]
    NonIntegrable { location: f64, exponent: f64 },

    #[error("tau = 2 is handled by the L_inf identity, not the tau-to-tau bound")]
    TauIsTwo,

    #[error("aliasing guard violated: {0}")]
    Aliasing(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("quadrature failed on [{a}, {b}]: {reason}")]
    Quadrature { a: f64, b: f64, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error stems from user configuration rather than numerics.
    pub fn is_config(&self) -> bool {
        !matches!(self, Error::Quadrature { .. })
    }
}
