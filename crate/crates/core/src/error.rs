use thiserror::Error;

/// Errors raised anywhere in the sampling pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("support violation at state {index}: {detail}")]
    Support { index: usize, detail: String },

    /// A mixing certificate turned out to be false at runtime: the residual
    /// mass or the acceptance probability left its valid range.
    #[error("certificate violation at state {state}: {detail}")]
    CertificateViolation { state: usize, detail: String },

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("stationary distribution is not unique (rank {rank} < {dim}); chain is reducible")]
    Multiplicity { rank: usize, dim: usize },

    #[error("all weights are zero")]
    EmptySupport,

    #[error("modeling error: {0}")]
    Modeling(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code used by the command-line harness: 1 for a failed
    /// check, 2 for unusable input, 3 for an exceeded resource budget.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::CertificateViolation { .. } | Error::Support { .. } => 1,
            Error::Resource(_) => 3,
            Error::Parse(_)
            | Error::Domain(_)
            | Error::InvalidDistribution(_)
            | Error::Multiplicity { .. }
            | Error::EmptySupport
            | Error::Modeling(_) => 2,
        }
    }

    /// The offending state index, when the error carries one.
    pub fn state_index(&self) -> Option<usize> {
        match self {
            Error::CertificateViolation { state, .. } => Some(*state),
            Error::Support { index, .. } => Some(*index),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
