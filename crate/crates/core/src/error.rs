use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("invalid subsystem selection: {0}")]
    InvalidSubset(String),

    #[error("not a valid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("eigenvectors coalesce at the exceptional point (R = {ratio})")]
    Defective { ratio: f64 },

    #[error("maximal entanglement is never reached from this initial state for R = {ratio}")]
    NoMaximalEntanglement { ratio: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("no crossing of the target in [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
