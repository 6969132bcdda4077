use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("assignment has length {found}, formula has {expected} variables")]
    LengthMismatch { expected: usize, found: usize },

    #[error("line {line}: malformed DIMACS header: {reason}")]
    MalformedHeader { line: usize, reason: String },

    #[error("line {line}: malformed DIMACS body: {reason}")]
    MalformedBody { line: usize, reason: String },

    #[error("literal {literal} out of range for {n_vars} variables")]
    LiteralOutOfRange { literal: i64, n_vars: usize },

    #[error("clause {clause} has width {found}, expected {expected}")]
    WrongClauseWidth {
        clause: usize,
        expected: usize,
        found: usize,
    },

    #[error("clause {clause} mentions variable {var} more than once")]
    RepeatedVariable { clause: usize, var: usize },

    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCountMismatch { declared: usize, found: usize },

    #[error("operation requires clause width {expected}, formula has width {found}")]
    WrongWidth { expected: &'static str, found: usize },

    #[error("clause width {0} is not supported (only 2 and 3)")]
    UnsupportedWidth(usize),

    #[error("{n_vars} variables exceeds the exhaustive enumeration limit of {limit}")]
    TooLarge { n_vars: usize, limit: usize },

    #[error("occupancy threshold must lie strictly between 0 and 1, got {0}")]
    InvalidThreshold(f64),

    #[error("sweep contains no points")]
    EmptySweep,

    #[error("invalid sweep config: {0}")]
    Config(String),

    #[error("checkpoint {path} was written for a different config (hash {found}, expected {expected})")]
    ResumeMismatch {
        path: PathBuf,
        expected: String,
        found: String,
    },

    #[error("solvers disagree on instance {instance} at density index {density}")]
    SolverDisagreement { density: usize, instance: usize },

    #[error("malformed CSV {path}: {reason}")]
    Csv { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
