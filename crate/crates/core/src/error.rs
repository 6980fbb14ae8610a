use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the planning engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate option name `{0}`")]
    DuplicateOption(String),

    #[error("option `{0}` has an empty domain")]
    EmptyDomain(String),

    #[error("option `{0}` has a domain that is not strictly increasing")]
    UnsortedDomain(String),

    #[error("configuration space has no options")]
    NoOptions,

    #[error("malformed space document at line {line}: {reason}")]
    MalformedSpace { line: usize, reason: String },

    #[error("plan {0:?} is not valid in this configuration space")]
    InvalidPlan(Vec<i64>),

    #[error("measurement data: {0}")]
    Dataset(String),

    #[error("plan {0:?} has no measurement in environment `{1}`")]
    Unmeasured(Vec<i64>, String),

    #[error("unknown environment `{0}`")]
    UnknownEnvironment(String),

    #[error("duplicate environment `{0}`")]
    DuplicateEnvironment(String),

    #[error("invalid landscape parameters: {0}")]
    Landscape(String),

    #[error("pool needs at least 2 plans, got {0}")]
    PoolTooSmall(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown planner `{0}`")]
    UnknownPlanner(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("trace: {0}")]
    Trace(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}
