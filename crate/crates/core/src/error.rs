use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at data row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("attribute '{0}' has no non-missing values")]
    AllMissing(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{transform} undefined for attribute '{attribute}' at row {row} (value {value})")]
    Domain {
        attribute: String,
        row: usize,
        transform: &'static str,
        value: f64,
    },

    #[error("target Gram matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:.6})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("{solver} did not converge after {iterations} iterations (final violation {violation:.3e})")]
    NotConverged {
        solver: &'static str,
        iterations: usize,
        violation: f64,
    },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("member '{member}': {source}")]
    Member {
        member: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn in_member(self, member: &str) -> Self {
        Error::Member {
            member: member.to_string(),
            source: Box::new(self),
        }
    }
}
