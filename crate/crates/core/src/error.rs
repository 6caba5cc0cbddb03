use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidSpec(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unstable normal-mode spectrum: eigenvalue {eigenvalue:e} of the position block is not positive")]
    Unstable { eigenvalue: f64 },

    #[error("mode index {index} out of range for a {modes}-mode state")]
    ModeOutOfRange { index: usize, modes: usize },

    #[error("mode index {0} selected more than once")]
    DuplicateMode(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("covariance matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("symplectic eigenvalue {nu} violates the uncertainty bound 1/2")]
    Unphysical { nu: f64 },

    #[error("relative entropy diverges: reference state has symplectic eigenvalue {nu} at the vacuum bound")]
    Divergent { nu: f64 },

    #[error("inverse temperature must be positive and finite, got {0}")]
    InvalidBeta(f64),

    #[error("the Spohn entropy production requires a time-independent system Hamiltonian")]
    DrivenSpohn,

    #[error("time grid must be uniform and start at t = 0 for this operation")]
    TimeGrid,

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("record at t = {t} fails validation: {reason}")]
    Validation { t: f64, reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Errors that come from bad input rather than from the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpec(_) | Error::Config(_) | Error::InvalidBeta(_) | Error::DrivenSpohn
        )
    }

    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Unstable { .. }
                | Error::NotPositiveDefinite
                | Error::Unphysical { .. }
                | Error::Divergent { .. }
                | Error::Eigen(_)
                | Error::Validation { .. }
                | Error::NonFinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
