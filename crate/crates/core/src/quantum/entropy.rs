//! Von Neumann and relative entropy, in nats.

use num_complex::Complex;

use super::{DensityMatrix, QuantumError};
use crate::scalar::Real;

/// Result of a relative-entropy computation. When the support of `ρ` leaks
/// outside the support of `σ` the quantity diverges; that case is reported
/// as a value rather than an error so parameter sweeps keep running.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RelativeEntropy<T> {
    Finite(T),
    /// `tr(ρ ln σ)` is `-∞`: some eigenvector of `σ` with eigenvalue below
    /// the support threshold carries weight `leaked` of `ρ`.
    Divergent { leaked: T },
}

impl<T: Real> RelativeEntropy<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, RelativeEntropy::Finite(_))
    }

    /// Finite value, or `+∞` for the divergent case.
    pub fn value(&self) -> T {
        match self {
            RelativeEntropy::Finite(v) => *v,
            RelativeEntropy::Divergent { .. } => T::max_value().unwrap(),
        }
    }
}

impl<T: Real> DensityMatrix<T> {
    /// Von Neumann entropy `−Σ λ ln λ` (nats), with `0 · ln 0 := 0`.
    /// Always lands in `[0, ln d]` because eigenvalues are clamped to
    /// `[0, 1]` first.
    pub fn von_neumann_entropy(&self) -> T {
        let mut s = T::zero();
        for ev in self.eigenvalues_clamped() {
            if ev > T::zero() {
                s -= ev * ev.ln();
            }
        }
        if s < T::zero() {
            T::zero()
        } else {
            s
        }
    }

    /// Relative entropy `NE(ρ‖σ) = tr(ρ ln ρ − ρ ln σ)` in nats.
    ///
    /// Nonnegative for all valid pairs with common support and zero iff
    /// `ρ = σ`. Eigenvalues of `σ` below the support threshold that carry
    /// weight of `ρ` make the result [`RelativeEntropy::Divergent`].
    pub fn relative_entropy(
        &self,
        sigma: &DensityMatrix<T>,
    ) -> Result<RelativeEntropy<T>, QuantumError> {
        if self.layout() != sigma.layout() {
            return Err(QuantumError::LayoutMismatch);
        }

        // tr(ρ ln ρ) from ρ's spectrum alone.
        let mut tr_rho_ln_rho = T::zero();
        for ev in self.eigenvalues_clamped() {
            if ev > T::zero() {
                tr_rho_ln_rho += ev * ev.ln();
            }
        }

        // tr(ρ ln σ) via σ's eigenbasis: Σ_k ln(μ_k) ⟨v_k|ρ|v_k⟩.
        let eig = sigma.matrix().clone().symmetric_eigen();
        let projected = eig.eigenvectors.adjoint() * self.matrix() * &eig.eigenvectors;
        let mut tr_rho_ln_sigma = T::zero();
        let mut leaked = T::zero();
        for (k, &mu_raw) in eig.eigenvalues.iter().enumerate() {
            let weight = projected[(k, k)].re;
            let mu = if mu_raw < T::zero() { T::zero() } else { mu_raw };
            if mu < T::support_tol() {
                if weight > T::support_tol() {
                    leaked += weight;
                }
            } else {
                tr_rho_ln_sigma += weight * mu.ln();
            }
        }
        if leaked > T::zero() {
            return Ok(RelativeEntropy::Divergent { leaked });
        }
        Ok(RelativeEntropy::Finite(tr_rho_ln_rho - tr_rho_ln_sigma))
    }
}

/// Unitary conjugation `U ρ U†`. Validity is preserved, so no re-validation
/// is performed; `u` must be unitary on the same dimension.
pub(crate) fn conjugate<T: Real>(
    rho: &DensityMatrix<T>,
    u: &nalgebra::DMatrix<Complex<T>>,
) -> DensityMatrix<T> {
    let m = u * rho.matrix() * u.adjoint();
    let herm = (&m + m.adjoint()) * Complex::new(T::of(0.5), T::zero());
    DensityMatrix::from_valid_parts(rho.layout().clone(), herm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{StateVector, SubsystemLayout};
    use approx::assert_relative_eq;

    #[test]
    fn pure_state_entropy_is_zero() {
        let psi = StateVector::<f64>::plus_product(2).unwrap();
        let s = psi.to_density().von_neumann_entropy();
        assert!(s.abs() < 1e-10, "entropy of pure state was {s}");
    }

    #[test]
    fn maximally_mixed_qubit_entropy_is_ln_2() {
        let rho = DensityMatrix::<f64>::maximally_mixed(SubsystemLayout::qubits(1).unwrap());
        assert_relative_eq!(rho.von_neumann_entropy(), 2.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn diagonal_three_quarters_entropy() {
        // −0.75 ln 0.75 − 0.25 ln 0.25, evaluated independently below
        let rho = DensityMatrix::<f64>::from_probabilities(
            SubsystemLayout::qubits(1).unwrap(),
            &[0.75, 0.25],
        )
        .unwrap();
        let oracle = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        assert_relative_eq!(oracle, 0.5623351446188083, epsilon = 1e-12);
        assert_relative_eq!(rho.von_neumann_entropy(), oracle, epsilon = 1e-12);
    }

    #[test]
    fn relative_entropy_of_identical_states_is_zero() {
        let rho = DensityMatrix::<f64>::from_probabilities(
            SubsystemLayout::qubits(1).unwrap(),
            &[0.6, 0.4],
        )
        .unwrap();
        match rho.relative_entropy(&rho).unwrap() {
            RelativeEntropy::Finite(v) => assert!(v.abs() < 1e-12),
            _ => panic!("expected finite"),
        }
    }

    #[test]
    fn relative_entropy_pure_vs_maximally_mixed_is_ln_d() {
        // NE(|0⟩⟨0| ‖ I/d) = ln d; d = 4 → 1.386294…
        let layout = SubsystemLayout::qubits(2).unwrap();
        let pure = StateVector::<f64>::basis_state(layout.clone(), 0)
            .unwrap()
            .to_density();
        let mixed = DensityMatrix::maximally_mixed(layout);
        match pure.relative_entropy(&mixed).unwrap() {
            RelativeEntropy::Finite(v) => {
                assert_relative_eq!(v, 4.0f64.ln(), epsilon = 1e-10);
                assert_relative_eq!(v, 1.3862943611198906, epsilon = 1e-10);
            }
            _ => panic!("expected finite"),
        }
    }

    #[test]
    fn relative_entropy_diagonal_example() {
        // NE(diag(0.75, 0.25) ‖ I/2) evaluated independently from the
        // eigendecomposition formula.
        let layout = SubsystemLayout::qubits(1).unwrap();
        let rho =
            DensityMatrix::<f64>::from_probabilities(layout.clone(), &[0.75, 0.25]).unwrap();
        let sigma = DensityMatrix::maximally_mixed(layout);
        let oracle = 0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln() - 0.5f64.ln();
        assert_relative_eq!(oracle, 0.13081203594113694, epsilon = 1e-12);
        match rho.relative_entropy(&sigma).unwrap() {
            RelativeEntropy::Finite(v) => assert_relative_eq!(v, oracle, epsilon = 1e-11),
            _ => panic!("expected finite"),
        }
    }

    #[test]
    fn relative_entropy_divergence_is_flagged() {
        // σ pure, ρ mixed: support of ρ leaks outside σ's support.
        let layout = SubsystemLayout::qubits(1).unwrap();
        let rho = DensityMatrix::<f64>::maximally_mixed(layout.clone());
        let sigma = StateVector::<f64>::basis_state(layout, 0)
            .unwrap()
            .to_density();
        match rho.relative_entropy(&sigma).unwrap() {
            RelativeEntropy::Divergent { leaked } => assert!(leaked > 0.4),
            _ => panic!("expected divergent"),
        }
    }
}
