use std::path::PathBuf;

/// Errors raised anywhere in the planning pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("incomplete mapping: period {0} is not mapped to any (rp, k)")]
    IncompleteMapping(usize),

    #[error("inconsistent weights: {0}")]
    InconsistentWeights(String),

    #[error("link error: {0}")]
    Link(String),

    #[error("schema error in {file}{}: {message}", .line.map(|l| format!(" line {l}")).unwrap_or_default())]
    Schema {
        file: String,
        line: Option<u64>,
        message: String,
    },

    #[error("flow regime error: {0}")]
    Regime(String),

    #[error("no feasible flow: {0}")]
    NoFeasibleFlow(String),

    #[error("emission error: {0}")]
    Emission(String),

    #[error("solver environment error: {0}")]
    Environment(String),

    #[error("solver protocol error: {0}")]
    Protocol(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("audit error: {0}")]
    Audit(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn schema(file: impl Into<String>, line: Option<u64>, message: impl Into<String>) -> Self {
        Error::Schema {
            file: file.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
