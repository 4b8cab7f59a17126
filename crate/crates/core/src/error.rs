//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    /// Document failed schema validation; `field` names the offending field.
    #[error("schema violation in field `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("duplicate document id `{0}` (use overwrite to replace)")]
    DuplicateId(String),

    #[error("document `{0}` not found")]
    NotFound(String),

    /// Line-oriented parse failure in a data file (ontology CSV, vector
    /// file, ladder, config, ...). `line` is 1-based.
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("vector dimension mismatch at {path}:{line}: expected {expected}, got {got}")]
    DimensionMismatch {
        path: PathBuf,
        line: usize,
        expected: usize,
        got: usize,
    },

    #[error("vector file {0} contains no vectors")]
    EmptyVectorFile(PathBuf),

    #[error("cosine similarity undefined for zero-norm vector")]
    ZeroNorm,

    #[error("word `{0}` not in vocabulary")]
    OutOfVocabulary(String),

    #[error("no in-vocabulary words among the given terms")]
    NoVectors,

    #[error("unknown concept id `{0}`")]
    UnknownConcept(String),

    /// `super_topic` edges must form a DAG; carries one offending cycle.
    #[error("super-topic cycle: {}", .0.join(" -> "))]
    SuperTopicCycle(Vec<String>),

    #[error("interest weights are all zero")]
    AllZeroWeights,

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Semantic validation failure that is not worth a dedicated variant.
    #[error("{0}")]
    Validation(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}
