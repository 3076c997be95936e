use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("label {label} at row {row}, column {column} is outside [0, {n_clusters})")]
    OutOfRangeLabel {
        row: usize,
        column: usize,
        label: i64,
        n_clusters: usize,
    },

    #[error("negative label {label} at position {index}")]
    NegativeLabel { index: usize, label: i64 },

    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRows { row: usize, expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("at least 2 items are required, got {0}")]
    TooFewItems(usize),

    #[error("cluster count mismatch: {left} vs {right}")]
    ClusterCountMismatch { left: usize, right: usize },

    #[error("column index {index} out of range for {n_columns} columns")]
    BadColumnIndex { index: usize, n_columns: usize },

    #[error("item {item} has zero probability under every latent class")]
    DegenerateRow { item: usize },

    #[error("log-likelihood is not finite at item {item}")]
    NonFinite { item: usize },

    #[error("latent class {cluster} received no responsibility mass")]
    EmptyCluster { cluster: usize },

    #[error("{n_points} points cannot be split into {n_clusters} clusters")]
    TooFewPoints { n_points: usize, n_clusters: usize },

    #[error("mixture component {component} collapsed")]
    SingularComponent { component: usize },

    #[error("invalid mixture specification: {0}")]
    BadSpec(String),

    #[error("more than {0} consecutive rejected draws in the Manly sampler")]
    RejectionOverflow(usize),

    #[error("invalid value: {0}")]
    InvalidArgument(String),

    #[error("{path}: parse error at line {line}: {message}")]
    ParseError { path: PathBuf, line: u64, message: String },

    #[error("{path}: non-numeric cell {value:?} at row {row}, column {column:?}")]
    NonNumericCell {
        path: PathBuf,
        row: usize,
        column: String,
        value: String,
    },

    #[error("missing column {0:?}")]
    MissingColumn(String),

    #[error("report has no records")]
    EmptyReport,

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dataset {dataset:?}, run {run}: {source}")]
    Run {
        dataset: String,
        run: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than a failure
    /// during computation. The CLI maps these to exit code 1.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Run { source, .. } => source.is_validation(),
            Error::DegenerateRow { .. }
            | Error::NonFinite { .. }
            | Error::EmptyCluster { .. }
            | Error::SingularComponent { .. }
            | Error::RejectionOverflow(_)
            | Error::Io(_) => false,
            _ => true,
        }
    }
}
