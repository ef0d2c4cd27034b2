use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parameter out of range: {0}")]
    Range(String),

    #[error("integral diverges: {0}")]
    Divergence(String),

    #[error("quadrature did not stabilize after {levels} refinement levels (last change {last_change:e})")]
    Refinement { levels: u32, last_change: f64 },

    #[error("Fourier refit residual {residual:e} exceeds tolerance {tol:e} at order {order}")]
    Truncation { residual: f64, tol: f64, order: usize },

    #[error("Theodorsen iteration did not converge after {iterations} iterations (last change {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("conformal map degenerate: min |G| on the unit circle is {min_modulus:e}")]
    Degenerate { min_modulus: f64 },

    #[error("Q has winding number {winding} on |z| = {radius}; no holomorphic logarithm")]
    Logarithm { winding: i64, radius: f64 },

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("no sign change found up to separation {max_separation:e}")]
    NotFound { max_separation: f64 },

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake_case tag for machine-readable output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDomain(_) => "invalid_domain",
            Error::Precondition(_) => "precondition",
            Error::Range(_) => "range",
            Error::Divergence(_) => "divergence",
            Error::Refinement { .. } => "refinement",
            Error::Truncation { .. } => "truncation",
            Error::Convergence { .. } => "convergence",
            Error::Degenerate { .. } => "degenerate",
            Error::Logarithm { .. } => "logarithm",
            Error::Hypothesis(_) => "hypothesis",
            Error::NotFound { .. } => "not_found",
            Error::Parse(_) => "parse",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
