//! Pure states on composite finite-dimensional spaces.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use super::{DensityMatrix, QuantumError, SubsystemLayout};
use crate::scalar::Real;

/// Normalized pure state `|ψ⟩` together with its subsystem layout.
///
/// Constructors normalize their input (rejecting zero vectors), so the
/// Euclidean norm is 1 up to rounding after any constructor.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    amplitudes: DVector<Complex<T>>,
    layout: SubsystemLayout,
}

impl<T: Real> StateVector<T> {
    /// Build a state from raw amplitudes, normalizing them.
    pub fn new(
        layout: SubsystemLayout,
        amplitudes: DVector<Complex<T>>,
    ) -> Result<Self, QuantumError> {
        if amplitudes.len() != layout.total_dim() {
            return Err(QuantumError::LengthMismatch {
                expected: layout.total_dim(),
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(QuantumError::ZeroNorm);
        }
        Ok(Self {
            amplitudes: amplitudes / Complex::new(norm, T::zero()),
            layout,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(layout: SubsystemLayout, index: usize) -> Result<Self, QuantumError> {
        let dim = layout.total_dim();
        if index >= dim {
            return Err(QuantumError::BasisIndexOutOfRange { index, dim });
        }
        let mut v = DVector::from_element(dim, Complex::new(T::zero(), T::zero()));
        v[index] = Complex::new(T::one(), T::zero());
        Ok(Self {
            amplitudes: v,
            layout,
        })
    }

    /// Qubit product state `|b_0 b_1 …⟩` from a bit string.
    pub fn qubit_bits(bits: &[u8]) -> Result<Self, QuantumError> {
        let layout = SubsystemLayout::qubits(bits.len())?;
        let strides = layout.strides();
        let mut index = 0usize;
        for (site, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(QuantumError::BasisIndexOutOfRange {
                    index: b as usize,
                    dim: 2,
                });
            }
            index += (b as usize) * strides[site];
        }
        Self::basis_state(layout, index)
    }

    /// `|+⟩^{⊗n}`: the uniform superposition over all qubit basis states.
    pub fn plus_product(n: usize) -> Result<Self, QuantumError> {
        let layout = SubsystemLayout::qubits(n)?;
        let dim = layout.total_dim();
        let amp = Complex::new(T::one() / T::of(dim as f64).sqrt(), T::zero());
        Ok(Self {
            amplitudes: DVector::from_element(dim, amp),
            layout,
        })
    }

    pub fn amplitudes(&self) -> &DVector<Complex<T>> {
        &self.amplitudes
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>, QuantumError> {
        if self.layout != other.layout {
            return Err(QuantumError::LayoutMismatch);
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Squared overlap `|⟨self|other⟩|²`: 0 for orthogonal states, 1 for
    /// identical states up to a global phase.
    pub fn overlap(&self, other: &Self) -> Result<T, QuantumError> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Kronecker product `self ⊗ other`; the combined layout is the
    /// concatenation of the two layouts.
    pub fn tensor_product(&self, other: &Self) -> Result<Self, QuantumError> {
        let layout = self.layout.concat(&other.layout)?;
        let amplitudes = self.amplitudes.kronecker(&other.amplitudes);
        // Product of unit vectors is a unit vector.
        Ok(Self { amplitudes, layout })
    }

    /// `|ψ⟩⟨ψ|` as a density matrix.
    pub fn to_density(&self) -> DensityMatrix<T> {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::from_valid_parts(self.layout.clone(), m)
    }

    /// Reduced density matrix on `keep` (strictly increasing site indices),
    /// tracing out the rest. Cheaper than forming `|ψ⟩⟨ψ|` first.
    pub fn reduced_density_matrix(&self, keep: &[usize]) -> Result<DensityMatrix<T>, QuantumError> {
        self.layout.check_site_subset(keep)?;
        let dims = self.layout.dims();
        let strides = self.layout.strides();
        let traced: Vec<usize> = (0..dims.len()).filter(|s| !keep.contains(s)).collect();

        let kept_offsets = enumerate_offsets(dims, &strides, keep);
        let traced_offsets = enumerate_offsets(dims, &strides, &traced);

        let da = kept_offsets.len();
        let mut m = DMatrix::from_element(da, da, Complex::new(T::zero(), T::zero()));
        for (a, &oa) in kept_offsets.iter().enumerate() {
            for (a2, &oa2) in kept_offsets.iter().enumerate() {
                let mut acc = Complex::new(T::zero(), T::zero());
                for &ob in &traced_offsets {
                    acc += self.amplitudes[oa + ob] * self.amplitudes[oa2 + ob].conj();
                }
                m[(a, a2)] = acc;
            }
        }
        let kept_dims: Vec<usize> = keep.iter().map(|&s| dims[s]).collect();
        Ok(DensityMatrix::from_valid_parts(
            SubsystemLayout::new(kept_dims)?,
            m,
        ))
    }

    /// Entanglement entropy (nats) of the first `⌊n_sites/2⌋` sites.
    pub fn half_chain_entropy(&self) -> T {
        let half = (self.layout.n_sites() / 2).max(1);
        let keep: Vec<usize> = (0..half).collect();
        self.reduced_density_matrix(&keep)
            .expect("half-chain subset is valid")
            .von_neumann_entropy()
    }

    pub(crate) fn from_valid_parts(
        layout: SubsystemLayout,
        amplitudes: DVector<Complex<T>>,
    ) -> Self {
        Self { amplitudes, layout }
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut DVector<Complex<T>> {
        &mut self.amplitudes
    }

    /// Rescale to unit norm after an in-place update.
    pub(crate) fn renormalize(&mut self) -> Result<(), QuantumError> {
        let norm = self.amplitudes.norm();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(QuantumError::ZeroNorm);
        }
        self.amplitudes /= Complex::new(norm, T::zero());
        Ok(())
    }
}

/// Basis offsets `Σ i_s · stride_s` for all multi-indices over `sites`.
fn enumerate_offsets(dims: &[usize], strides: &[usize], sites: &[usize]) -> Vec<usize> {
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
struct StateJson {
    dims: Vec<usize>,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl<T: Real> Serialize for StateVector<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        StateJson {
            dims: self.layout.dims().to_vec(),
            re: self.amplitudes.iter().map(|z| z.re.as_f64()).collect(),
            im: self.amplitudes.iter().map(|z| z.im.as_f64()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for StateVector<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = StateJson::deserialize(deserializer)?;
        if raw.re.len() != raw.im.len() {
            return Err(D::Error::custom("re and im arrays differ in length"));
        }
        let layout = SubsystemLayout::new(raw.dims).map_err(D::Error::custom)?;
        let v = DVector::from_iterator(
            raw.re.len(),
            raw.re
                .iter()
                .zip(&raw.im)
                .map(|(&r, &i)| Complex::new(T::of(r), T::of(i))),
        );
        Self::new(layout, v).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c_of;
    use approx::assert_relative_eq;

    fn qubit(amps: [(f64, f64); 2]) -> StateVector<f64> {
        StateVector::new(
            SubsystemLayout::qubits(1).unwrap(),
            DVector::from_vec(amps.iter().map(|&(r, i)| c_of(r, i)).collect()),
        )
        .unwrap()
    }

    fn plus() -> StateVector<f64> {
        qubit([(1.0, 0.0), (1.0, 0.0)])
    }

    fn minus() -> StateVector<f64> {
        qubit([(1.0, 0.0), (-1.0, 0.0)])
    }

    #[test]
    fn constructors_normalize() {
        let s = qubit([(3.0, 0.0), (4.0, 0.0)]);
        assert_relative_eq!(s.amplitudes().norm(), 1.0, max_relative = 1e-15);
        assert!(StateVector::<f64>::new(
            SubsystemLayout::qubits(1).unwrap(),
            DVector::from_vec(vec![c_of(0.0, 0.0), c_of(0.0, 0.0)]),
        )
        .is_err());
    }

    #[test]
    fn tensor_product_of_basis_states() {
        // |0⟩ ⊗ |0⟩ → (1,0,0,0)
        let zero = StateVector::<f64>::qubit_bits(&[0]).unwrap();
        let t = zero.tensor_product(&zero).unwrap();
        assert_eq!(t.layout().dims(), &[2, 2]);
        assert_eq!(t.amplitudes()[0], c_of(1.0, 0.0));
        for k in 1..4 {
            assert_eq!(t.amplitudes()[k], c_of(0.0, 0.0));
        }
    }

    #[test]
    fn tensor_product_plus_minus() {
        // |+⟩ ⊗ |−⟩ → (1/2)(1,−1,1,−1), computed by hand as a Kronecker product
        let t = plus().tensor_product(&minus()).unwrap();
        let expect = [0.5, -0.5, 0.5, -0.5];
        for (k, &e) in expect.iter().enumerate() {
            assert_relative_eq!(t.amplitudes()[k].re, e, epsilon = 1e-15);
            assert_relative_eq!(t.amplitudes()[k].im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn tensor_preserves_norm() {
        let t = plus().tensor_product(&minus()).unwrap();
        assert_relative_eq!(t.amplitudes().norm(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn overlap_examples() {
        let zero = StateVector::<f64>::qubit_bits(&[0]).unwrap();
        let one = StateVector::<f64>::qubit_bits(&[1]).unwrap();
        // ⟨0|1⟩ → 0
        assert_eq!(zero.overlap(&one).unwrap(), 0.0);
        // overlap(|0⟩, |+⟩) → 0.5
        assert_relative_eq!(zero.overlap(&plus()).unwrap(), 0.5, epsilon = 1e-15);
        // global phase is invisible
        let phased = qubit([(0.36f64.cos(), 0.36f64.sin()), (0.0, 0.0)]);
        assert_relative_eq!(zero.overlap(&phased).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn overlap_rejects_layout_mismatch() {
        let a = StateVector::<f64>::qubit_bits(&[0]).unwrap();
        let b = StateVector::<f64>::qubit_bits(&[0, 0]).unwrap();
        assert!(matches!(
            a.overlap(&b),
            Err(QuantumError::LayoutMismatch)
        ));
    }

    #[test]
    fn serde_schema_roundtrip() {
        let s = plus();
        let json = serde_json::to_value(&s).unwrap();
        assert!(json.get("dims").is_some() && json.get("re").is_some() && json.get("im").is_some());
        let back: StateVector<f64> = serde_json::from_value(json).unwrap();
        assert_relative_eq!(back.overlap(&s).unwrap(), 1.0, epsilon = 1e-12);
    }
}
