use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation needs subsystem dimensions but the matrix is unstructured")]
    Unstructured,

    #[error("subsystem index {index} out of range for {count} subsystems")]
    InvalidSubsystem { index: usize, count: usize },

    #[error("partial trace needs at least one subsystem to keep")]
    EmptyKeep,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parameters do not describe a physical state (eigenvalue {min_eigenvalue:e})")]
    NotPhysical { min_eigenvalue: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unknown target state `{0}`")]
    UnknownTarget(String),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("distillability is undecidable for sampler `{0}`")]
    Undecidable(String),

    #[error("optimizer did not converge: {0}")]
    NotConverged(String),
}
