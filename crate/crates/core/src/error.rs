use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (relative deviation {deviation:.3e}, tolerance {tolerance:.1e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("invalid size {size} for {what}")]
    InvalidSize { what: &'static str, size: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("invalid hamiltonian spec: {0}")]
    InvalidSpec(String),

    #[error("non-Hermitian objective: {0}")]
    NonHermitianObjective(String),

    #[error("kernel is singular at T = {t} (|sin(B T / 2)| = {sine:.3e})")]
    SingularTime { t: f64, sine: f64 },

    #[error("integration grid is degenerate: {0}")]
    StepUnderflow(String),

    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("index {index} out of range (size {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid times: {0}")]
    InvalidTimes(String),

    #[error("eigendecomposition failed: {0}")]
    Decomposition(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error stems from user input rather than from a numerical
    /// failure. The CLI maps these to exit code 2 and the rest to 3.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpec(_)
                | Error::InvalidConfig(_)
                | Error::NonHermitianObjective(_)
                | Error::InvalidTimes(_)
                | Error::Json(_)
                | Error::Io(_)
                | Error::InvalidSize { .. }
                | Error::IndexOutOfRange { .. }
                | Error::QubitOutOfRange { .. }
                | Error::DimensionMismatch { .. }
                | Error::NotPowerOfTwo(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
