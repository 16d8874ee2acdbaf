use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("zero-information series `{ticker}`: all values are identical")]
    ZeroInformation { ticker: String },

    #[error("series `{ticker}` has zero variance")]
    ZeroVariance { ticker: String },

    #[error("degenerate conditioning: |corr| = 1 between `{conditioned}` and `{condition}`")]
    DegenerateConditioning {
        conditioned: String,
        condition: String,
    },

    #[error("expected a table of arity {expected}, got {actual}")]
    Arity { expected: usize, actual: usize },

    #[error("empty contingency table (sample size 0)")]
    EmptyTable,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("graph is disconnected; components: {components:?}")]
    Disconnected { components: Vec<Vec<String>> },

    #[error("no sector for ticker `{0}`")]
    MissingSector(String),

    #[error("graph has no connected triple")]
    NoConnectedTriple,

    #[error("index {index} out of range for {len} series")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("unknown {kind} `{value}`")]
    UnknownTag { kind: &'static str, value: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Self::InvalidInput(message.into())
    }
}
