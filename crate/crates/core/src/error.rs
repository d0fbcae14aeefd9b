//! Crate-wide error type.
//!
//! Numerical routines in this crate fail loudly rather than silently
//! degrading: a structure that cannot be certified at the requested
//! tolerance is reported as an error carrying the offending residual,
//! so callers can distinguish "not a valid input" from "algorithm bug".

use thiserror::Error;

/// All errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix had a different shape than required.
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: String,
        got: String,
        context: &'static str,
    },

    /// A matrix failed the Hermiticity check.
    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    /// A matrix failed the positive-semidefiniteness check.
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:.3e} below -{tol:.3e}")]
    NotPsd { min_eig: f64, tol: f64 },

    /// A map failed the trace-preservation check.
    #[error("map is not trace preserving: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotTracePreserving { residual: f64, tol: f64 },

    /// A matrix expected to be an orthogonal projection is not one.
    #[error("matrix is not a projection: ||P^2 - P|| = {residual:.3e} exceeds {tol:.3e}")]
    NotProjection { residual: f64, tol: f64 },

    /// An operator set was empty or otherwise unusable.
    #[error("invalid observable set: {0}")]
    InvalidObservables(String),

    /// A transfer matrix violated a spectral precondition.
    #[error("spectral precondition violated: {0}")]
    SpectralPrecondition(String),

    /// Eigenvalue clustering could not separate groups unambiguously.
    #[error("eigenvalue clustering ambiguous: gap {gap:.3e} at tolerance {tol:.3e}")]
    ClusteringAmbiguous { gap: f64, tol: f64 },

    /// The randomized block-diagonalization failed to certify a structure.
    #[error("block structure not certified after {retries} retries: {detail}")]
    NonGenericSample { retries: usize, detail: String },

    /// The interior-point solver did not converge.
    #[error("SDP solver failed after {iterations} iterations: {detail}")]
    SolverFailure { iterations: usize, detail: String },

    /// A feasibility outcome could not be classified at the tolerance.
    #[error("SDP outcome marginal: objective {objective:.3e} within band {band:.3e}")]
    MarginalOutcome { objective: f64, band: f64 },

    /// A constructed object failed its own verification.
    #[error("verification failed: {context} residual {residual:.3e} exceeds {tol:.3e}")]
    VerificationFailed {
        context: String,
        residual: f64,
        tol: f64,
    },

    /// Polynomial root finding did not converge.
    #[error("root finding failed: {0}")]
    RootFinding(String),

    /// Curve extraction produced an ill-conditioned interpolation.
    #[error("curve interpolation ill-conditioned: residual {residual:.3e} after rescale")]
    CurveConditioning { residual: f64 },

    /// Monodromy path tracking lost a root.
    #[error("path tracking failed: {detail} (step ratio {step_ratio:.3e})")]
    TrackingFailure { detail: String, step_ratio: f64 },

    /// An internal consistency check failed; indicates a bug or a
    /// violated mathematical assumption.
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for a [`Error::DimensionMismatch`].
    pub fn dims(expected: impl Into<String>, got: impl Into<String>, context: &'static str) -> Self {
        Error::DimensionMismatch {
            expected: expected.into(),
            got: got.into(),
            context,
        }
    }
}
