use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{layer}: expected input shape {expected:?}, found {found:?}")]
    ShapeMismatch {
        layer: String,
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("tensor of shape {shape:?} needs {expected} elements, got {found}")]
    DataLength {
        shape: Vec<usize>,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value at element {index}")]
    NonFinite { index: usize },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("class index {index} out of range, valid classes are 0..{count}")]
    ClassIndex { index: usize, count: usize },

    #[error("unknown class `{name}`, known classes: {known}")]
    UnknownClass { name: String, known: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("model file: {message} (at byte offset {offset})")]
    ModelFormat { offset: u64, message: String },

    #[error("model file version {found} is not supported (expected {expected})")]
    ModelVersion { found: u16, expected: u16 },

    #[error("unsupported image format: {0}")]
    UnsupportedImage(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Prefixes a shape error with the position of the offending layer.
    pub(crate) fn at_layer(self, index: usize) -> Self {
        match self {
            Error::ShapeMismatch {
                layer,
                expected,
                found,
            } => Error::ShapeMismatch {
                layer: format!("layer {index} ({layer})"),
                expected,
                found,
            },
            other => other,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
