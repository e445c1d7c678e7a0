//! Two-state-vector formalism: pre/post-selected ensembles and weak values.

use nalgebra::DMatrix;
use num_complex::Complex;

use super::MeasurementError;
use crate::hamiltonians::hermiticity_deviation;
use crate::quantum::{QuantumError, StateVector};
use crate::scalar::Real;

/// A pre-selected state `|φ_in⟩` and a post-selected state `|φ_fin⟩` on the
/// same layout. Both are normalized by construction of [`StateVector`].
#[derive(Clone, Debug)]
pub struct PrePostSelection<T: Real> {
    phi_in: StateVector<T>,
    phi_fin: StateVector<T>,
}

impl<T: Real> PrePostSelection<T> {
    pub fn new(phi_in: StateVector<T>, phi_fin: StateVector<T>) -> Result<Self, MeasurementError> {
        if phi_in.layout() != phi_fin.layout() {
            return Err(MeasurementError::Quantum(QuantumError::LayoutMismatch));
        }
        Ok(Self { phi_in, phi_fin })
    }

    pub fn phi_in(&self) -> &StateVector<T> {
        &self.phi_in
    }

    pub fn phi_fin(&self) -> &StateVector<T> {
        &self.phi_fin
    }

    /// `⟨φ_fin|φ_in⟩`.
    pub fn transition_amplitude(&self) -> Complex<T> {
        self.phi_fin
            .inner(&self.phi_in)
            .expect("layouts checked at construction")
    }

    /// `|⟨φ_fin|φ_in⟩|²`: the leading-order post-selection probability.
    pub fn first_order_postselection_probability(&self) -> T {
        self.transition_amplitude().norm_sqr()
    }
}

/// Weak value of a Hermitian observable under pre/post-selection. For
/// near-orthogonal selections the value diverges and is reported as a flag
/// with the magnitude of the numerator rather than as a crash or infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeakValue<T> {
    Finite(Complex<T>),
    Divergent { numerator_mag: T, overlap_mag: T },
}

impl<T: Real> WeakValue<T> {
    pub fn finite(&self) -> Option<Complex<T>> {
        match self {
            WeakValue::Finite(z) => Some(*z),
            WeakValue::Divergent { .. } => None,
        }
    }
}

/// `⟨A⟩_w = ⟨φ_fin|A|φ_in⟩ / ⟨φ_fin|φ_in⟩` for a Hermitian observable `A`.
///
/// The weak value is complex in general and may lie far outside the
/// eigenvalue range of `A` (anomalous amplification).
pub fn weak_value<T: Real>(
    sel: &PrePostSelection<T>,
    observable: &DMatrix<Complex<T>>,
) -> Result<WeakValue<T>, MeasurementError> {
    let dim = sel.phi_in.dim();
    if observable.nrows() != dim || observable.ncols() != dim {
        return Err(MeasurementError::BadOperatorShape {
            index: 0,
            rows: observable.nrows(),
            cols: observable.ncols(),
            dim,
        });
    }
    let dev = hermiticity_deviation(observable);
    if dev > T::strict_tol() {
        return Err(MeasurementError::NotHermitian {
            max_dev: dev.as_f64(),
        });
    }
    let numerator = sel
        .phi_fin
        .amplitudes()
        .dotc(&(observable * sel.phi_in.amplitudes()));
    let overlap = sel.transition_amplitude();
    let overlap_mag = overlap.norm_sqr().sqrt();
    if overlap_mag <= T::of(1e-12) {
        return Ok(WeakValue::Divergent {
            numerator_mag: numerator.norm_sqr().sqrt(),
            overlap_mag,
        });
    }
    Ok(WeakValue::Finite(numerator / overlap))
}
