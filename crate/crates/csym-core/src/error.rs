//! Crate-wide error type.

/// Errors raised by validation, factorization, and certification.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid tolerance configuration: {0}")]
    InvalidConfig(String),

    #[error("factorization did not converge")]
    FactorizationFailure,

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error(
        "matrix is not positive semidefinite (eigenvalue {min_eigenvalue:.3e} below threshold)"
    )]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("matrix is not symmetric (residual {residual:.3e})")]
    NotSymmetric { residual: f64 },

    #[error("not a partial isometry (projection residual {residual:.3e})")]
    NotPartialIsometry { residual: f64 },

    #[error("conjugation does not certify the operator (residual {residual:.3e})")]
    NotCertifying { residual: f64 },

    #[error("synthesized conjugation failed validation: {0}")]
    SynthesisValidation(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
