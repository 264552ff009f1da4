use thiserror::Error;

/// Errors raised by the numerical modules.
///
/// Variant names are stable: the command-line front end reports them verbatim.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("susceptibility has a pole at {0}")]
    Pole(String),

    #[error("causality violation: {0}")]
    Causality(String),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("quadrature did not converge after {panels} panels (partial value {value:e}, error estimate {estimate:e})")]
    Convergence {
        value: f64,
        estimate: f64,
        panels: usize,
    },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("query {query:e} outside tabulated range [{lo:e}, {hi:e}]")]
    Extrapolation { query: f64, lo: f64, hi: f64 },

    #[error("format error: {0}")]
    Format(String),

    #[error("tabulated data does not cover the spectral support; suggested omega_max {suggested_omega_max:e}")]
    Coverage { suggested_omega_max: f64 },

    #[error("junction is in the running state: |I| = {bias:e} >= I_C = {critical:e}")]
    RunningState { bias: f64, critical: f64 },

    #[error("circulant embedding is not nonnegative definite (min eigenvalue {min_eigenvalue:e}); {suggestion}")]
    Embedding {
        min_eigenvalue: f64,
        suggestion: String,
    },

    #[error("trajectory blew up on path {path} at step {step}")]
    BlowUp { path: usize, step: usize },

    #[error("invalid parameter: {0}")]
    Validation(String),

    #[error("unit system error: {0}")]
    Unit(String),

    #[error("evaluation paths disagree: {primary:e} vs {alternate:e}")]
    PathMismatch { primary: f64, alternate: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short stable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "Domain",
            Error::Pole(_) => "Pole",
            Error::Causality(_) => "Causality",
            Error::Divergent(_) => "Divergent",
            Error::Convergence { .. } => "Convergence",
            Error::Unsupported(_) => "Unsupported",
            Error::Extrapolation { .. } => "Extrapolation",
            Error::Format(_) => "Format",
            Error::Coverage { .. } => "Coverage",
            Error::RunningState { .. } => "RunningState",
            Error::Embedding { .. } => "Embedding",
            Error::BlowUp { .. } => "BlowUp",
            Error::Validation(_) => "Validation",
            Error::Unit(_) => "Unit",
            Error::PathMismatch { .. } => "PathMismatch",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
