use thiserror::Error;

use crate::expr::ParseError;

/// Configuration and input errors; all map to exit status 2.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed scenario: {0}")]
    Json(#[from] serde_json::Error),

    #[error("in {location}: {source}")]
    Expression {
        location: String,
        #[source]
        source: ParseError,
    },

    #[error("invalid scenario: {0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] excalc_core::Error),
}

pub type Result<T, E = ConfigError> = std::result::Result<T, E>;
