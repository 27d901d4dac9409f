use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("expected a bitstring of length {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{num_qubits} qubits exceeds the enumeration guard of {guard}")]
    TooManyQubits { num_qubits: usize, guard: usize },

    #[error("spectrum is fully degenerate: no gap")]
    NoGap,

    #[error("upscale factor must be finite and >= 1, got {0}")]
    InvalidAlpha(f64),

    #[error("oracle gives no amplification between the solution and runner-up levels")]
    NoAmplification,

    #[error("non-finite value at basis index {index}")]
    NonFinite { index: usize },

    #[error("exp(h*dt) overflows at basis index {index}; use a smaller dt or pre-shift the Hamiltonian")]
    Overflow { index: usize },

    #[error("inconsistent McLachlan system: squared step error {0}")]
    InconsistentSystem(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
