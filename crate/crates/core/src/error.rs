use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error in parameter `{param}`: {reason}")]
    Config { param: String, reason: String },

    #[error("singular point at r = {r}: V'(r) = 0")]
    SingularPoint { r: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),

    #[error("analysis error: {0}")]
    Analysis(String),

    #[error("chart corruption: {0}")]
    ChartCorruption(String),

    #[error("asymptotics mismatch: {0}")]
    AsymptoticsMismatch(String),

    #[error("output error: {0}")]
    Output(String),

    #[error("transcription alarm: residual varies with radius by {spread:e} at g = {exponent}")]
    TranscriptionAlarm { exponent: f64, spread: f64 },
}

impl Error {
    pub(crate) fn config(param: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { param: param.into(), reason: reason.into() }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Output(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Output(e.to_string())
    }
}
