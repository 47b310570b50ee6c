use std::path::PathBuf;

/// Errors produced by the walk simulator and its experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("register with mu = {mu} exceeds the statevector capacity (mu <= {max})")]
    Capacity { mu: u32, max: u32 },

    #[error("outcome {outcome} selected with probability {probability:e}; cannot renormalize a null branch")]
    DegenerateOutcome { outcome: u8, probability: f64 },

    #[error("statevector left the two-branch subspace: residual amplitude {residual:e} at basis index {index}")]
    EngineDivergence { index: usize, residual: f64 },

    #[error("{0} diverges")]
    Divergence(String),

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
