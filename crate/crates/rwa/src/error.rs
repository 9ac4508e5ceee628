use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by dataset ingestion, training, and chain analysis.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("class {class} has no examples{context}")]
    EmptyClass { class: usize, context: String },

    #[error("iteration {iteration} failed after retry: {message}")]
    IterationFailed { iteration: usize, message: String },

    #[error("transition matrix is not row-stochastic: {0}")]
    NotRowStochastic(String),

    #[error(
        "chain is reducible; states {unreachable:?} are not mutually reachable from state {from}"
    )]
    ReducibleChain {
        from: usize,
        unreachable: Vec<usize>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("model file error: {0}")]
    ModelFormat(String),
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

    /// Process exit code for the CLI: 2 for bad inputs, 3 for numerical or
    /// contract failures discovered while computing.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::InvalidInput(_)
            | Error::DimensionMismatch(_)
            | Error::ModelFormat(_) => 2,
            Error::SingleClass
            | Error::EmptyClass { .. }
            | Error::IterationFailed { .. }
            | Error::NotRowStochastic(_)
            | Error::ReducibleChain { .. }
            | Error::Numerical(_) => 3,
        }
    }
}
