use thiserror::Error;

/// Errors raised by the integration library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("numeric integration failed: {0}")]
    IntegrationFailure(String),
    #[error("unsupported weight family: {0}")]
    UnsupportedFamily(String),
    #[error("function is not in the weighted space: {0}")]
    NotInSpace(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("enumeration did not terminate: {0}")]
    Enumeration(String),
    #[error("truncation cap exceeded: {0}")]
    Truncation(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("algorithm class violation: {0}")]
    Class(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether the error stems from invalid user input rather than a failure at run time.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Shape(_)
                | Error::Configuration(_)
                | Error::Parameter(_)
                | Error::Parse(_)
                | Error::NotInSpace(_)
                | Error::UnsupportedFamily(_)
                | Error::Class(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
