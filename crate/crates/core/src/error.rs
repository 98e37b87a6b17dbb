use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid function bound to space #{found} used with space #{expected}")]
    SpaceMismatch { expected: u64, found: u64 },

    #[error("grid function has {found} coefficients, space dimension is {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value {value} while {context}")]
    NonFinite { context: String, value: f64 },

    #[error("time {time} is not on the reference grid of step {ref_step}")]
    OffGrid { time: f64, ref_step: f64 },

    #[error("noise requested on [{start}, {end}] but the store ends at {horizon}")]
    NoiseExhausted { start: f64, end: f64, horizon: f64 },

    #[error("noise intensity is nonzero but the run has no noise store")]
    MissingNoise,

    #[error("trajectory diverged at step {step} (tau = {tau}, norm = {norm})")]
    Diverged { step: usize, tau: f64, norm: f64 },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("{failed} of {total} samples failed, above the 10% limit")]
    TooManyFailures { failed: usize, total: usize },

    #[error("i/o: {0}")]
    Io(String),

    #[error("malformed noise dump: {0}")]
    Format(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
