use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("time {t} outside trajectory domain (0, {terminal}]")]
    OutsideDomain { t: f64, terminal: f64 },

    #[error("retarded time did not converge within {iterations} iterations (last step {last_step:e} s)")]
    RetardedTimeDiverged { iterations: usize, last_step: f64 },

    #[error("retarded-time failure at receiver {receiver}, step {step}: {source}")]
    RecordCell {
        receiver: usize,
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("evaluation point coincides with the source")]
    CoincidentPoints,

    #[error("non-positive Doppler denominator {0:e} in paper-literal mode")]
    NonPositiveDenominator(f64),

    #[error("Neumann series diverged at iteration {iteration} (update norm {update:e})")]
    NeumannDiverged { iteration: usize, update: f64 },

    #[error("indicator undefined at step {step}: {reason}")]
    UndefinedIndicator { step: usize, reason: String },

    #[error("sampling point within exclusion radius of receiver {receiver}")]
    NearReceiver { receiver: usize },

    #[error("no admissible lattice point in search ball (radius {radius} m)")]
    EmptyBall { radius: f64 },

    #[error("{phase}: {source}")]
    Phase {
        phase: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn in_phase(self, phase: &'static str) -> Self {
        Error::Phase {
            phase,
            source: Box::new(self),
        }
    }
}
