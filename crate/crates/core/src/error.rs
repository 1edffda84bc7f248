use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The contraction against the other factors vanished; the factor carries
    /// no information and must be re-drawn.
    #[error("degenerate contraction for block {block}")]
    DegenerateContraction { block: usize },

    /// |<psi|phi>| is within 1e-12 of one, so no rotation plane exists.
    #[error("states coincide up to phase (|overlap| = {overlap})")]
    DegeneratePair { overlap: f64 },

    #[error("non-Hermitian generator: max |H - H^dagger| = {deviation:e}")]
    NonHermitian { deviation: f64 },

    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("oracle scale exceeded: {0}")]
    OracleScale(String),

    #[error("state file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
