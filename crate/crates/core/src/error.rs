use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count must be in 1..={max}, got {n}")]
    InvalidQubitCount { n: usize, max: usize },

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: expected {expected} qubits, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("phase mode mismatch: {0}")]
    PhaseModeMismatch(String),

    #[error("tableau is not symplectic")]
    NotSymplectic,

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid move set: {0}")]
    InvalidMoveSet(String),

    #[error("invalid fidelity: {0}")]
    InvalidFidelity(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("correlation undefined: zero variance in {0}")]
    ZeroVariance(&'static str),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("model file error: {0}")]
    ModelFormat(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("tableau not present in distance table (mode mismatch or corrupt table)")]
    UnknownTableau,

    #[error("distance table error: {0}")]
    TableFormat(String),

    #[error("gate {0} is not part of the move set")]
    GateNotInMoveSet(String),

    #[error("guidance evaluation failed: {0}")]
    Guidance(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
