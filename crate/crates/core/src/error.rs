use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("register size mismatch: expected {expected}, found {found}")]
    RegisterMismatch { expected: usize, found: usize },

    #[error("operation {0} is not a Clifford gate")]
    NonClifford(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("architecture inconsistent with run: {0}")]
    Architecture(String),

    #[error("restart probability must be < 1 (got {0})")]
    CertainRestart(f64),

    #[error("shot exceeded the layer cap of {cap} layers")]
    LayerCapExceeded { cap: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
