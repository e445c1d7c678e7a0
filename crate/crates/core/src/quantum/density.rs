//! Mixed states on composite finite-dimensional spaces.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use super::{QuantumError, StateVector, SubsystemLayout};
use crate::scalar::Real;

/// Density matrix `ρ`: Hermitian, unit trace, positive semidefinite up to
/// tolerance, on a composite layout.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: DMatrix<Complex<T>>,
    layout: SubsystemLayout,
}

impl<T: Real> DensityMatrix<T> {
    /// Validate and store a density matrix. The stored matrix is the
    /// Hermitian average `(m + m†)/2` of the input.
    pub fn new(layout: SubsystemLayout, matrix: DMatrix<Complex<T>>) -> Result<Self, QuantumError> {
        let dim = layout.total_dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(QuantumError::LengthMismatch {
                expected: dim,
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        let mut max_dev = T::zero();
        for i in 0..dim {
            for j in 0..dim {
                let dev = (matrix[(i, j)] - matrix[(j, i)].conj()).norm_sqr().sqrt();
                if dev > max_dev {
                    max_dev = dev;
                }
            }
        }
        if max_dev > T::strict_tol() {
            return Err(QuantumError::NotHermitian {
                max_dev: max_dev.as_f64(),
            });
        }
        let hermitized = (&matrix + matrix.adjoint()) * Complex::new(T::of(0.5), T::zero());

        let trace = hermitized.trace();
        if (trace.re - T::one()).abs() > T::strict_tol() || trace.im.abs() > T::strict_tol() {
            return Err(QuantumError::BadTrace {
                trace: trace.re.as_f64(),
            });
        }

        let min_eig = hermitized
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(T::max_value().unwrap(), |a, b| if b < a { b } else { a });
        if min_eig < -T::psd_tol() {
            return Err(QuantumError::NotPositive {
                min_eigenvalue: min_eig.as_f64(),
            });
        }
        Ok(Self {
            matrix: hermitized,
            layout,
        })
    }

    /// The maximally mixed state `I/d`.
    pub fn maximally_mixed(layout: SubsystemLayout) -> Self {
        let d = layout.total_dim();
        let m = DMatrix::from_diagonal_element(
            d,
            d,
            Complex::new(T::one() / T::of(d as f64), T::zero()),
        );
        Self { matrix: m, layout }
    }

    /// Diagonal mixed state from a probability vector (renormalized).
    pub fn from_probabilities(
        layout: SubsystemLayout,
        probs: &[T],
    ) -> Result<Self, QuantumError> {
        let dim = layout.total_dim();
        if probs.len() != dim {
            return Err(QuantumError::LengthMismatch {
                expected: dim,
                got: probs.len(),
            });
        }
        let mut total = T::zero();
        for &p in probs {
            if p < T::zero() {
                return Err(QuantumError::NotPositive {
                    min_eigenvalue: p.as_f64(),
                });
            }
            total += p;
        }
        if !(total > T::zero()) {
            return Err(QuantumError::ZeroNorm);
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex::new(probs[i] / total, T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        });
        Ok(Self { matrix: m, layout })
    }

    pub fn from_pure(state: &StateVector<T>) -> Self {
        state.to_density()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.trace()
    }

    /// `tr ρ²`; equals `Σ |ρ_ij|²` for Hermitian `ρ`.
    pub fn purity(&self) -> T {
        self.matrix.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b)
    }

    /// Expectation `⟨ψ|ρ|ψ⟩` (real part; imaginary part vanishes for
    /// Hermitian `ρ`).
    pub fn expectation(&self, psi: &StateVector<T>) -> Result<T, QuantumError> {
        if psi.layout() != &self.layout {
            return Err(QuantumError::LayoutMismatch);
        }
        let v = &self.matrix * psi.amplitudes();
        Ok(psi.amplitudes().dotc(&v).re)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor_product(&self, other: &Self) -> Result<Self, QuantumError> {
        let layout = self.layout.concat(&other.layout)?;
        let matrix = self.matrix.kronecker(&other.matrix);
        Ok(Self { matrix, layout })
    }

    /// Partial trace keeping the sites in `keep` (strictly increasing).
    /// The result is a valid density matrix on the kept sites with unit
    /// trace.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self, QuantumError> {
        self.layout.check_site_subset(keep)?;
        let dims = self.layout.dims();
        let strides = self.layout.strides();
        let traced: Vec<usize> = (0..dims.len()).filter(|s| !keep.contains(s)).collect();

        let kept_offsets = offsets_for(dims, &strides, keep);
        let traced_offsets = offsets_for(dims, &strides, &traced);

        let da = kept_offsets.len();
        let mut m = DMatrix::from_element(da, da, Complex::new(T::zero(), T::zero()));
        for (a, &oa) in kept_offsets.iter().enumerate() {
            for (a2, &oa2) in kept_offsets.iter().enumerate() {
                let mut acc = Complex::new(T::zero(), T::zero());
                for &ob in &traced_offsets {
                    acc += self.matrix[(oa + ob, oa2 + ob)];
                }
                m[(a, a2)] = acc;
            }
        }
        let kept_dims: Vec<usize> = keep.iter().map(|&s| dims[s]).collect();
        Ok(Self {
            matrix: m,
            layout: SubsystemLayout::new(kept_dims)?,
        })
    }

    /// Eigenvalues sorted ascending and clamped into `[0, 1]`; values in
    /// `[-psd_tol, 0)` are clamped to 0 so that `λ ln λ` terms never produce
    /// NaN downstream.
    pub fn eigenvalues_clamped(&self) -> Vec<T> {
        let mut evs: Vec<T> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .collect();
        evs.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        for ev in evs.iter_mut() {
            if *ev < T::zero() {
                *ev = T::zero();
            } else if *ev > T::one() {
                *ev = T::one();
            }
        }
        evs
    }

    /// Construction bypass for results of operations that preserve validity by
    /// construction (unitary conjugation, partial trace of a valid state, …).
    pub(crate) fn from_valid_parts(layout: SubsystemLayout, matrix: DMatrix<Complex<T>>) -> Self {
        Self { matrix, layout }
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut DMatrix<Complex<T>> {
        &mut self.matrix
    }
}

fn offsets_for(dims: &[usize], strides: &[usize], sites: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for &s in sites {
        let mut next = Vec::with_capacity(offsets.len() * dims[s]);
        for &o in &offsets {
            for i in 0..dims[s] {
                next.push(o + i * strides[s]);
            }
        }
        offsets = next;
    }
    offsets
}

#[derive(Serialize, Deserialize)]
struct DensityJson {
    dims: Vec<usize>,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl<T: Real> Serialize for DensityMatrix<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let d = self.dim();
        let mut re = Vec::with_capacity(d * d);
        let mut im = Vec::with_capacity(d * d);
        // Row-major flattening.
        for i in 0..d {
            for j in 0..d {
                re.push(self.matrix[(i, j)].re.as_f64());
                im.push(self.matrix[(i, j)].im.as_f64());
            }
        }
        DensityJson {
            dims: self.layout.dims().to_vec(),
            re,
            im,
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for DensityMatrix<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = DensityJson::deserialize(deserializer)?;
        let layout = SubsystemLayout::new(raw.dims).map_err(D::Error::custom)?;
        let d = layout.total_dim();
        if raw.re.len() != d * d || raw.im.len() != d * d {
            return Err(D::Error::custom("matrix arrays have wrong length"));
        }
        let m = DMatrix::from_fn(d, d, |i, j| {
            let k = i * d + j;
            Complex::new(T::of(raw.re[k]), T::of(raw.im[k]))
        });
        Self::new(layout, m).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c_of;
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    fn bell() -> StateVector<f64> {
        let layout = SubsystemLayout::qubits(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::new(
            layout,
            DVector::from_vec(vec![c_of(s, 0.0), c_of(0.0, 0.0), c_of(0.0, 0.0), c_of(s, 0.0)]),
        )
        .unwrap()
    }

    fn ghz3() -> StateVector<f64> {
        let layout = SubsystemLayout::qubits(3).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![c_of(0.0, 0.0); 8];
        v[0] = c_of(s, 0.0);
        v[7] = c_of(s, 0.0);
        StateVector::new(layout, DVector::from_vec(v)).unwrap()
    }

    #[test]
    fn validation_rejects_non_hermitian_and_bad_trace() {
        let layout = SubsystemLayout::qubits(1).unwrap();
        let m = DMatrix::from_row_slice(2, 2, &[c_of::<f64>(0.5, 0.0), c_of(0.1, 0.0), c_of(0.3, 0.0), c_of(0.5, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(layout.clone(), m),
            Err(QuantumError::NotHermitian { .. })
        ));
        let m = DMatrix::from_row_slice(2, 2, &[c_of::<f64>(0.7, 0.0), c_of(0.0, 0.0), c_of(0.0, 0.0), c_of(0.7, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(layout.clone(), m),
            Err(QuantumError::BadTrace { .. })
        ));
        let m = DMatrix::from_row_slice(2, 2, &[c_of::<f64>(1.5, 0.0), c_of(0.0, 0.0), c_of(0.0, 0.0), c_of(-0.5, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(layout, m),
            Err(QuantumError::NotPositive { .. })
        ));
    }

    #[test]
    fn tensor_of_maximally_mixed() {
        // I/2 ⊗ I/2 → I/4 on dim 4
        let q = SubsystemLayout::qubits(1).unwrap();
        let half = DensityMatrix::<f64>::maximally_mixed(q);
        let quarter = half.tensor_product(&half).unwrap();
        assert_eq!(quarter.dim(), 4);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 0.25 } else { 0.0 };
                assert_relative_eq!(quarter.matrix()[(i, j)].re, expect, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn partial_trace_bell_is_maximally_mixed() {
        let rho = bell().to_density();
        let r = rho.partial_trace(&[0]).unwrap();
        assert_eq!(r.dim(), 2);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 0.5 } else { 0.0 };
                assert_relative_eq!(r.matrix()[(i, j)].re, expect, epsilon = 1e-12);
                assert_relative_eq!(r.matrix()[(i, j)].im, 0.0, epsilon = 1e-12);
            }
        }
        assert_relative_eq!(r.trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_product_factorizes() {
        // |0⟩ ⊗ |+⟩, keep site 1 → |+⟩⟨+|
        let zero = StateVector::<f64>::qubit_bits(&[0]).unwrap();
        let plus = StateVector::<f64>::plus_product(1).unwrap();
        let prod = zero.tensor_product(&plus).unwrap().to_density();
        let r = prod.partial_trace(&[1]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(r.matrix()[(i, j)].re, 0.5, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn partial_trace_ghz_two_site_marginal() {
        // GHZ on 3 qubits, keep {0,1} → (|00⟩⟨00| + |11⟩⟨11|)/2, by hand
        let rho = ghz3().to_density();
        let r = rho.partial_trace(&[0, 1]).unwrap();
        assert_eq!(r.dim(), 4);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if (i == 0 && j == 0) || (i == 3 && j == 3) {
                    0.5
                } else {
                    0.0
                };
                assert_relative_eq!(r.matrix()[(i, j)].re, expect, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn partial_trace_errors() {
        let rho = bell().to_density();
        assert!(matches!(
            rho.partial_trace(&[]),
            Err(QuantumError::EmptyKeepSet)
        ));
        assert!(matches!(
            rho.partial_trace(&[5]),
            Err(QuantumError::SiteOutOfRange { .. })
        ));
    }

    #[test]
    fn serde_row_major_roundtrip() {
        let rho = bell().to_density();
        let json = serde_json::to_value(&rho).unwrap();
        let back: DensityMatrix<f64> = serde_json::from_value(json).unwrap();
        assert_relative_eq!((back.matrix() - rho.matrix()).norm(), 0.0, epsilon = 1e-12);
    }
}
