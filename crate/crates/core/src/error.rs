use thiserror::Error;

/// Errors raised by the toolkit.
///
/// The variants are grouped by who is at fault: configuration and argument
/// errors come from the caller, inconsistency errors mean a certificate did
/// not hold and should never happen on the shipped towers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("valuation of the zero function is undefined")]
    UndefinedValuation,

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("analysis required: {0}")]
    AnalysisRequired(String),

    #[error("analysis failure: {0}")]
    Analysis(String),

    #[error("precision cap {cap} exceeded: {what}")]
    Precision { what: String, cap: usize },

    #[error("inconsistency: {0}")]
    Inconsistency(String),

    #[error("lift refused:\n{0}")]
    LiftRefused(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for errors caused by the caller's configuration rather than by a
    /// failed certificate.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Unsupported(_)
                | Error::Argument(_)
                | Error::Precondition(_)
                | Error::LiftRefused(_)
        )
    }
}
