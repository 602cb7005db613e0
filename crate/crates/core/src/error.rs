use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count {n} is below the minimum of {min}")]
    TooFewQubits { n: usize, min: usize },
    #[error("grid parameter c = {0} is out of range")]
    InvalidGridParameter(f64),
    #[error("condition number diverges at c = 0")]
    DivergentConditionNumber,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("dense size 2^{qubits} exceeds the cap 2^{cap}")]
    CapExceeded { qubits: usize, cap: usize },
    #[error("qubit {qubit} out of range for a {n}-qubit register")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("gate targets are not distinct")]
    DuplicateTargets,
    #[error("vector is zero")]
    ZeroVector,
    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("shot count must be positive")]
    ZeroShots,
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("polynomial degree {degree} exceeds qubit count {n}")]
    DegreeTooHigh { degree: usize, n: usize },
    #[error("right-hand side violates the zero-sum constraint (sum {0:e})")]
    NonZeroSum(f64),
    #[error("node is already in the tree")]
    DuplicateNode,
    #[error("no candidate nodes remain")]
    NoCandidates,
    #[error("empty tree")]
    EmptyTree,
    #[error("solver failed at time step {step}: {reason}")]
    StepFailed { step: usize, reason: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
