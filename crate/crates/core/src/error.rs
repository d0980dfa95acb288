use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid Pauli letter {0:?}")]
    InvalidLetter(char),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{n} qubits exceeds the dense simulator ceiling of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("reference state is not normalised (norm {0})")]
    NotNormalized(f64),

    #[error("need moments through index {needed}, have through {available}")]
    InsufficientMoments { needed: usize, available: usize },

    #[error("moment {index} has magnitude {value:e}; rescale the Hamiltonian by its spectral norm")]
    MomentOverflow { index: usize, value: f64 },

    #[error("no overlap eigenvalue above threshold {tau:e}; subspace is empty")]
    EmptySubspace { tau: f64 },

    #[error("non-positive norm {0:e} for candidate state")]
    NonPositiveNorm(f64),

    #[error("tensor index {needed} outside order {order}")]
    CoverageExceeded { needed: usize, order: usize },

    #[error("no solvable candidate")]
    NoSolvableCandidate,

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
