use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient data: need at least {required} samples, got {got}")]
    InsufficientData { required: usize, got: usize },

    #[error("shape mismatch: expected {expected} features, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("non-finite value produced at iteration {iteration}")]
    Numeric { iteration: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("threshold selection error: {0}")]
    Selection(String),

    #[error("{}: row {row}, column {column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        row: u64,
        column: usize,
        message: String,
    },

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("manifest mismatch for dataset '{name}': {message}")]
    Manifest { name: String, message: String },

    #[error("model file error: {0}")]
    ModelFormat(String),

    #[error("unsupported model format version '{found}' (supported: '{supported}')")]
    Version { found: String, supported: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("toml: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    /// Short stable name of the error class, used in machine-parseable CLI output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::InsufficientData { .. } => "insufficient-data",
            Error::Shape { .. } => "shape",
            Error::Numeric { .. } => "numeric",
            Error::Config(_) => "config",
            Error::Evaluation(_) => "evaluation",
            Error::Selection(_) => "selection",
            Error::Parse { .. } => "parse",
            Error::Dataset(_) => "dataset",
            Error::Manifest { .. } => "manifest",
            Error::ModelFormat(_) => "model-format",
            Error::Version { .. } => "version",
            Error::Io { .. } => "io",
            Error::Toml(_) => "toml",
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
