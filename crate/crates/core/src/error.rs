use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("`{0}` is not derived when the coupling G is supplied directly")]
    NotDerived(&'static str),

    #[error("radiation-pressure steady state is not unique ({real_roots} real detunings solve the self-consistency condition)")]
    Bistable { real_roots: usize },

    #[error("OPO at/above threshold: |epsilon| = {epsilon_abs:e} must be below gamma_o/2 = {half_gamma:e}")]
    OpoThreshold { epsilon_abs: f64, half_gamma: f64 },

    #[error("squeezing spec carries no OPO parameters; the exact solver needs (gamma_o, epsilon)")]
    MissingOpo,

    #[error("variance must be positive, got {0:e}")]
    NonPositiveVariance(f64),

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("dynamically unstable configuration ({detail})")]
    Unstable { detail: String },

    #[error("linear solve failed: {0}")]
    Singular(&'static str),

    #[error("quadrature table needs at least 8 samples, got {0}")]
    TooFewSamples(usize),

    #[error("negative delay tau = {0:e}; use the stationarity symmetry for tau < 0")]
    NegativeDelay(f64),

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { key: key.into(), message: message.into() }
    }

    /// Configuration-class failures map to CLI exit code 2, everything else numeric to 3.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::InvalidParameter { .. }
                | Error::OpoThreshold { .. }
                | Error::MissingOpo
                | Error::NotDerived(_)
                | Error::Io(_)
        )
    }
}
