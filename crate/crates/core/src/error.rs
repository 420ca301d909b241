use thiserror::Error;

/// Raw signed dual weights returned when a certificate cannot be pruned.
pub type RawDuals = Vec<(Vec<f64>, f64)>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate body: {0}")]
    Degenerate(String),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("polynomial degree {found} exceeds {max}")]
    DegreeTooHigh { max: usize, found: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("certificate unavailable: {reason}")]
    CertificateUnavailable { reason: String, raw: RawDuals },

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("not a witness: {0}")]
    NotAWitness(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
