use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("archive is empty")]
    EmptyArchive,

    #[error("phase {phase} out of range (total phases {total})")]
    PhaseOutOfRange { phase: usize, total: usize },

    #[error("simulation diverged at step {step}: {detail}")]
    SimulationDiverged { step: usize, detail: String },

    #[error("invalid value for key `{key}`: {reason}")]
    InvalidConfigValue { key: String, reason: String },

    #[error("unknown config key `{0}`")]
    UnknownConfigKey(String),

    #[error("config line {line}: {reason}")]
    ConfigSyntax { line: usize, reason: String },

    #[error("unknown metric `{name}` (valid metrics: {valid})")]
    UnknownMetric { name: String, valid: String },

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: malformed file: {reason}")]
    Malformed { path: PathBuf, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
