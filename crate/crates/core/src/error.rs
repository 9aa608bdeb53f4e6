use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad argument to an operation: unknown node, schema mismatch, unknown object id.
    #[error("input error: {0}")]
    Input(String),

    /// Inconsistent run configuration or projection spec.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed file content, located by path and line (or record) number.
    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("concept limit exceeded: lattice grew past {limit} concepts (raise --max-concepts or use a stricter projection)")]
    ConceptLimit { limit: usize },

    #[error("object limit exceeded: dataset has {found} objects, the limit is {limit}")]
    ObjectLimit { limit: usize, found: usize },

    #[error("invalid lattice: {0} (run validate_lattice for the full violation list)")]
    InvalidLattice(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by resource limits rather than bad input.
    pub fn is_limit(&self) -> bool {
        matches!(self, Error::ConceptLimit { .. } | Error::ObjectLimit { .. })
    }
}
