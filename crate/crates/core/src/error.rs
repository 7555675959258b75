use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A line of an input file could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The input parsed but violates a structural invariant.
    #[error("{0}")]
    Structure(String),

    /// An operation was called outside of its domain.
    #[error("{0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Every waypoint of a path coincides, so it has no arc length.
    #[error("degenerate path: all waypoints coincide")]
    DegeneratePath,

    #[error("scene {index}: {source}")]
    Scene {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }

    pub(crate) fn structure(message: impl Into<String>) -> Self {
        Error::Structure(message.into())
    }
}
