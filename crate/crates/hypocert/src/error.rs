//! Error type shared by every module of the crate.

use num_complex::Complex64;
use thiserror::Error;

/// Failures reported by the toolkit.
#[derive(Debug, Error)]
pub enum HypoError {
    /// A caller-supplied argument is outside the supported range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The shifted QR iteration hit its iteration cap.
    ///
    /// `partial` holds the eigenvalues that had already deflated.
    #[error("eigenvalue iteration did not converge after {iterations} sweeps ({} of {n} eigenvalues found)", partial.len())]
    NoConvergence {
        /// Number of QR sweeps performed.
        iterations: usize,
        /// Matrix dimension.
        n: usize,
        /// Eigenvalues that converged before the cap was reached.
        partial: Vec<Complex64>,
    },

    /// The eigenvector matrix is too ill-conditioned to be trusted.
    #[error("matrix is numerically defective (eigenvector condition number {condition:.3e}); decay with polynomial prefactors is not handled")]
    Defective {
        /// Estimated 2-norm condition number of the eigenvector matrix.
        condition: f64,
    },

    /// The pair does not satisfy the structural pattern an ansatz needs.
    #[error("not applicable: {0}")]
    PatternMismatch(String),

    /// A named hypocoercivity condition fails for the given pair.
    #[error("condition violated: {0}")]
    ConditionViolated(String),

    /// The pair is not hypocoercive.
    #[error("not hypocoercive: {0}")]
    NotHypocoercive(String),

    /// Parsing or formatting a serialized artifact failed.
    #[error("format error: {0}")]
    Format(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, HypoError>;
