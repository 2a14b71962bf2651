use thiserror::Error;

/// Errors produced by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid jammer distribution: {0}")]
    InvalidDistribution(String),

    #[error("unsupported dimension {dim} for {what}")]
    UnsupportedDimension { what: &'static str, dim: usize },

    /// Receiver indices are 0-based; messages print them 1-based.
    ///
    /// A receiver is jammed with probability one, so the region or scheme
    /// degenerates. Drop the receiver explicitly instead.
    #[error("receiver {} has zero probability of being unjammed", .receiver + 1)]
    DegenerateMarginal { receiver: usize },

    #[error("operation requires a permutation-symmetric jammer distribution")]
    NotSymmetric,

    #[error("numerical failure: {0}")]
    Numeric(String),

    /// The scheme exceeded its slot cap without serving every receiver.
    #[error("receiver {} starved: run exceeded the cap of {cap} slots", .receiver + 1)]
    Starved { receiver: usize, cap: u64 },

    #[error("trial {index}: {source}")]
    Trial {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Strips any trial annotation and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Trial { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
