//! Finite-dimensional quantum states and the entropy/overlap primitives the
//! rest of the crate consumes.
//!
//! Pure states live in [`StateVector`], mixed states in [`DensityMatrix`];
//! both carry a [`SubsystemLayout`] describing the tensor factorization.
//! All values are immutable after construction and all operations are pure,
//! so they can be shared freely across worker threads.

mod density;
mod entropy;
mod layout;
mod state;

pub use density::DensityMatrix;
pub use entropy::RelativeEntropy;
pub(crate) use entropy::conjugate;
pub use layout::SubsystemLayout;
pub use state::StateVector;

use thiserror::Error;

/// Errors from state construction and state algebra.
#[derive(Debug, Clone, Error)]
pub enum QuantumError {
    #[error("layout must contain at least one site")]
    EmptyLayout,
    #[error("site {site} has dimension {dim}, need at least 2")]
    BadSiteDimension { site: usize, dim: usize },
    #[error("total dimension overflows usize")]
    DimensionOverflow,
    #[error("expected {expected} amplitudes/rows, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("vector has zero (or non-finite) norm and cannot be normalized")]
    ZeroNorm,
    #[error("matrix is not Hermitian (max elementwise deviation {max_dev:.3e})")]
    NotHermitian { max_dev: f64 },
    #[error("trace is {trace:.12} instead of 1")]
    BadTrace { trace: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("operands live on different layouts")]
    LayoutMismatch,
    #[error("keep set must not be empty")]
    EmptyKeepSet,
    #[error("site index {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("site subset must be strictly increasing")]
    UnsortedSites,
    #[error("basis index {index} out of range for dimension {dim}")]
    BasisIndexOutOfRange { index: usize, dim: usize },
}
