use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric argument lies outside the domain of the routine.
    #[error("domain error: {0}")]
    Domain(String),
    /// A model or run configuration is malformed or inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
    /// The requested moment does not exist for the chosen seed.
    #[error("unsupported moment: {0}")]
    UnsupportedMoment(String),
    /// A theoretical assumption needed for the result fails.
    #[error("assumption violated: {0}")]
    AssumptionViolation(String),
    /// The data are too short or constant for the requested statistic.
    #[error("degenerate series: {0}")]
    DegenerateSeries(String),
    /// Input data could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    /// Timestamps are not increasing.
    #[error("order error at line {line}: {message}")]
    Order { line: usize, message: String },
    /// Invalid or missing input data.
    #[error("input error: {0}")]
    Input(String),
    /// An iterative routine failed to converge.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// A file could not be read or written.
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable category name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Config(_) => "configuration",
            Error::UnsupportedMoment(_) => "unsupported_moment",
            Error::AssumptionViolation(_) => "assumption_violation",
            Error::DegenerateSeries(_) => "degenerate_series",
            Error::Parse { .. } => "parse",
            Error::Order { .. } => "order",
            Error::Input(_) => "input",
            Error::Convergence(_) => "convergence",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
