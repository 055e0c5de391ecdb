use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    /// A formula was evaluated outside its domain (non-positive hardware
    /// parameter, loss factor outside `[0, 1)`).
    #[error("domain error: {0}")]
    Domain(String),

    /// The simulation configuration violates one or more invariants.
    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// A metric is undefined for the given node set.
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("unknown protocol `{0}` (expected one of hetwet, pgo, poa, mobiweb)")]
    UnknownProtocol(String),

    #[error("failed to parse config file {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
