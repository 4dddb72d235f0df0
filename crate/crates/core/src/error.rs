//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building operators or running sweeps.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension {dim} exceeds the supported limit {limit}")]
    DimensionLimit { dim: usize, limit: usize },

    #[error("amplitude vector length {len} is not a nonzero power of two")]
    NotPowerOfTwo { len: usize },

    #[error("state norm deviates from 1 by {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    #[error("matrix is not Hermitian: |H - H^dagger| reaches {deviation:.3e} at ({row}, {col})")]
    NotHermitian {
        deviation: f64,
        row: usize,
        col: usize,
    },

    #[error("Bloch axis must be a unit vector, got norm {norm}")]
    InvalidAxis { norm: f64 },

    #[error("invalid schedule: {reason}")]
    InvalidSchedule { reason: String },

    #[error("time {t} lies outside the schedule domain [0, {runtime}]")]
    TimeOutOfRange { t: f64, runtime: f64 },

    #[error("invalid projector set: {reason}")]
    InvalidProjectors { reason: String },

    #[error("invalid qubit indices: {reason}")]
    InvalidIndices { reason: String },

    #[error("ground state degenerate at t = {t}: gap {gap:.3e} below {limit:.3e}")]
    DegenerateGroundState { t: f64, gap: f64, limit: f64 },

    #[error("evolution lost normalization: |norm - 1| = {deviation:.3e}")]
    NormDrift { deviation: f64 },

    #[error("ancilla is not prepared in |0>: P(1) = {weight:.3e}")]
    AncillaNotReady { weight: f64 },

    #[error("ancilla reset rejected: residual weight {residual:.3e} outside |1>")]
    ResetRejected { residual: f64 },

    #[error("unknown gate name {name:?}")]
    UnknownGate { name: String },

    #[error("gate parameter error: {reason}")]
    BadGateParameter { reason: String },

    #[error("gate {index} failed: {source}")]
    GateFailed {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid input: {reason}")]
    InvalidInput { reason: String },
}

impl Error {
    /// Convenience constructor for free-form input rejections.
    pub fn invalid_input(reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            reason: reason.into(),
        }
    }
}
