//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("qubit count {0} is outside the supported range 1..=64")]
    BadQubitCount(usize),

    #[error("amplitude vector has length {len}, expected {expected} for {n_qubits} qubits")]
    AmplitudeLength {
        len: usize,
        expected: usize,
        n_qubits: usize,
    },

    #[error("state norm² deviates from 1 by {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    #[error("sparse support index {index} appears more than once")]
    DuplicateSupportIndex { index: u64 },

    #[error("sparse support index {index} exceeds the basis of {n_qubits} qubits")]
    SupportIndexOutOfRange { index: u64, n_qubits: usize },

    #[error("qubit index {index} is outside 1..={n_qubits}")]
    QubitIndexOutOfRange { index: usize, n_qubits: usize },

    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |entry - adjoint entry| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix trace deviates from 1 by {deviation:.3e}")]
    TraceNotOne { deviation: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("eigenvalue iteration failed to converge")]
    EigenNonConvergence,

    #[error("interaction spec covers {spec_qubits} qubits but the state has {state_qubits}")]
    SpecLengthMismatch {
        spec_qubits: usize,
        state_qubits: usize,
    },

    #[error("continuum-cutoff mode requires a mode cutoff")]
    MissingCutoff,

    #[error("evolution parameters invalid: {0}")]
    BadEvolutionParams(String),

    #[error("{0}")]
    SparseUnsupported(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error(
        "rejection sampler exhausted {attempts} attempts ({accepted} accepted, rate {rate:.3e})"
    )]
    RejectionLimit {
        attempts: u64,
        accepted: u64,
        rate: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("statistics: {0}")]
    Stats(String),
}
