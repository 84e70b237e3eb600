use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge on [{a}, {b}] (depth exhausted)")]
    QuadratureNonConvergence { a: f64, b: f64 },

    #[error("no sign change found while bracketing (last bracket [{lo}, {hi}])")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("generator evaluated at the origin in dimension {n}")]
    PolarSingularity { n: usize },

    #[error("search failed: {0}")]
    SearchFailure(String),

    #[error("function is not increasing: {0}")]
    MonotonicityFailure(String),

    #[error("asymptotic ratio condition violated: limit estimate {estimate} is not above {bound}")]
    RatioCondition { estimate: f64, bound: f64 },

    #[error("regularity clause ({clause}) cannot be satisfied: {detail}")]
    RegularityViolation { clause: &'static str, detail: String },

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("neither converse Cheeger condition holds (required delta {delta})")]
    NeitherCondition { delta: f64 },

    #[error("log-concavity violated at r = {at} (second difference {value})")]
    LogConcavityViolation { at: f64, value: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("degenerate test family: {0}")]
    DegenerateFamily(String),

    #[error("config error at line {line}, field `{field}`: {message}")]
    Config {
        line: usize,
        field: String,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
