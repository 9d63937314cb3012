use thiserror::Error;

/// Errors raised by the library and mapped to exit codes by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NonHermitianInput(f64),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not block diagonal (max off-block modulus {0:.3e})")]
    NotBlockDiagonal(f64),

    #[error("invalid block state: {0}")]
    InvalidBlockState(String),

    #[error("block decompositions differ: {0:?} vs {1:?}")]
    DecompositionMismatch(Vec<usize>, Vec<usize>),

    #[error("state is not a member of the constraint set: {0}")]
    NotAMember(String),

    #[error("perturbation leaves the marginal polytope at epsilon = {0}")]
    InfeasibleDirection(f64),

    #[error("epsilon ladder unusable for exponent fit: {0}")]
    InsufficientLadder(String),

    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),

    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },

    #[error("validation error at {field}: {msg}")]
    Validation { field: String, msg: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, msg: impl std::fmt::Display) -> Self {
        Error::Validation {
            field: field.into(),
            msg: msg.to_string(),
        }
    }

    /// Process exit code for the CLI: 3 for numerical failures, 2 for everything
    /// traceable to the inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) | Error::InsufficientLadder(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
