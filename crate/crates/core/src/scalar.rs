//! Scalar abstraction: every numerical module in this crate is generic over a
//! real floating-point type implementing [`Real`].
//!
//! Concrete code should normally go through the `f64` aliases exported at the
//! crate root; `f32` is available for memory-bound experiments. Validation
//! tolerances scale with the precision of the concrete type — the `f64`
//! values are the ones the test suite pins down.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type for all state amplitudes, operators and derived
/// quantities.
pub trait Real: RealField + FromPrimitive + ToPrimitive + Copy + Default {
    /// Tolerance for strict structural checks: unit norms, Hermiticity,
    /// unit trace, Kraus/POVM completeness.
    fn strict_tol() -> Self;

    /// How far below zero an eigenvalue of a nominally positive-semidefinite
    /// matrix may sit before the matrix is rejected.
    fn psd_tol() -> Self;

    /// Threshold below which an eigenvalue counts as lying outside the
    /// support of a density matrix.
    fn support_tol() -> Self;

    /// Convert an `f64` literal into this scalar type.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    /// Lossy view as `f64`, mainly for diagnostics and serialization.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    #[inline]
    fn strict_tol() -> Self {
        1e-10
    }
    #[inline]
    fn psd_tol() -> Self {
        1e-8
    }
    #[inline]
    fn support_tol() -> Self {
        1e-12
    }
}

impl Real for f32 {
    #[inline]
    fn strict_tol() -> Self {
        1e-5
    }
    #[inline]
    fn psd_tol() -> Self {
        1e-4
    }
    #[inline]
    fn support_tol() -> Self {
        1e-6
    }
}

/// Complex number with real literal parts.
#[inline]
pub fn c_of<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::of(re), T::of(im))
}

/// Promote a real scalar to a complex one.
#[inline]
pub fn c_re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}
