//! 1-D Madelung/Bohmian decomposition on a uniform grid: amplitude–phase
//! split `ψ = R e^{iS/ħ}`, quantum potential `Q = −(ħ²/2m) R''/R`, momentum
//! field `p = ∂S/∂x`, and the ħ-scaling classical-limit diagnostic.
//!
//! `S` is only defined up to 2π branches where `|ψ|` vanishes: values at
//! masked points (nodes and grid edges) are reported as absent rather than
//! interpolated.

use num_complex::Complex;
use serde::Serialize;
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, Error)]
pub enum MadelungError {
    #[error("grid needs at least 16 points, got {0}")]
    GridTooSmall(usize),
    #[error("grid spacing must be uniform and positive")]
    NonUniformGrid,
    #[error("values length {got} does not match grid length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("hbar must be positive, got {0}")]
    BadHbar(f64),
    #[error("mass must be positive, got {0}")]
    BadMass(f64),
    #[error("wavefunction has zero norm")]
    ZeroNorm,
    #[error("hbar list must be strictly decreasing and positive")]
    BadHbarList,
}

/// Complex wavefunction sampled on a uniform 1-D grid, with configurable
/// `ħ` and mass. The discrete L² norm `Σ|ψ|² dx` is 1 after construction.
#[derive(Clone, Debug)]
pub struct GridWavefunction<T: Real> {
    positions: Vec<T>,
    dx: T,
    values: Vec<Complex<T>>,
    hbar: T,
    mass: T,
}

impl<T: Real> GridWavefunction<T> {
    pub fn new(
        positions: Vec<T>,
        values: Vec<Complex<T>>,
        hbar: T,
        mass: T,
    ) -> Result<Self, MadelungError> {
        if positions.len() < 16 {
            return Err(MadelungError::GridTooSmall(positions.len()));
        }
        if values.len() != positions.len() {
            return Err(MadelungError::LengthMismatch {
                expected: positions.len(),
                got: values.len(),
            });
        }
        let dx = positions[1] - positions[0];
        if !(dx > T::zero()) {
            return Err(MadelungError::NonUniformGrid);
        }
        let tol = dx * T::of(1e-9);
        for w in positions.windows(2) {
            if ((w[1] - w[0]) - dx).abs() > tol {
                return Err(MadelungError::NonUniformGrid);
            }
        }
        if !(hbar > T::zero()) || !hbar.is_finite() {
            return Err(MadelungError::BadHbar(hbar.as_f64()));
        }
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(MadelungError::BadMass(mass.as_f64()));
        }
        let mass_sq: T = values.iter().fold(T::zero(), |a, z| a + z.norm_sqr()) * dx;
        if !(mass_sq > T::zero()) || !mass_sq.is_finite() {
            return Err(MadelungError::ZeroNorm);
        }
        let scale = Complex::new(T::one() / mass_sq.sqrt(), T::zero());
        let values = values.into_iter().map(|z| z * scale).collect();
        Ok(Self {
            positions,
            dx,
            values,
            hbar,
            mass,
        })
    }

    /// Uniform grid of `n` points on `[−extent, extent]`.
    pub fn uniform_grid(n: usize, extent: T) -> Vec<T> {
        let dx = extent * T::of(2.0) / T::of((n - 1) as f64);
        (0..n).map(|j| -extent + dx * T::of(j as f64)).collect()
    }

    /// Gaussian wavepacket of position spread `sigma`, carrier momentum
    /// `k0` (in units of 1/length; the phase is `k0·x`).
    pub fn gaussian(
        n: usize,
        extent: T,
        sigma: T,
        k0: T,
        hbar: T,
        mass: T,
    ) -> Result<Self, MadelungError> {
        let xs = Self::uniform_grid(n, extent);
        let four = T::of(4.0);
        let values = xs
            .iter()
            .map(|&x| {
                let envelope = (-(x * x) / (four * sigma * sigma)).exp();
                let phase = k0 * x;
                Complex::new(envelope * phase.cos(), envelope * phase.sin())
            })
            .collect();
        Self::new(xs, values, hbar, mass)
    }

    /// Harmonic-oscillator ground state for frequency `omega`:
    /// `R ∝ exp(−mωx²/2ħ)`.
    pub fn oscillator_ground(
        n: usize,
        extent: T,
        omega: T,
        hbar: T,
        mass: T,
    ) -> Result<Self, MadelungError> {
        let xs = Self::uniform_grid(n, extent);
        let values = xs
            .iter()
            .map(|&x| {
                let arg = -(mass * omega * x * x) / (hbar * T::of(2.0));
                Complex::new(arg.exp(), T::zero())
            })
            .collect();
        Self::new(xs, values, hbar, mass)
    }

    /// First excited oscillator state, `R ∝ |x| exp(−mωx²/2ħ)` with a node
    /// (and a π phase jump) at the origin.
    pub fn oscillator_first_excited(
        n: usize,
        extent: T,
        omega: T,
        hbar: T,
        mass: T,
    ) -> Result<Self, MadelungError> {
        let xs = Self::uniform_grid(n, extent);
        let values = xs
            .iter()
            .map(|&x| {
                let arg = -(mass * omega * x * x) / (hbar * T::of(2.0));
                Complex::new(x * arg.exp(), T::zero())
            })
            .collect();
        Self::new(xs, values, hbar, mass)
    }

    pub fn positions(&self) -> &[T] {
        &self.positions
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn mass(&self) -> T {
        self.mass
    }
}

/// Amplitude and (unwrapped) action fields of a decomposed wavefunction.
#[derive(Clone, Debug, Serialize)]
pub struct HydroFields<T> {
    pub positions: Vec<T>,
    pub dx: T,
    pub hbar: T,
    pub mass: T,
    /// Nonnegative amplitude `R = |ψ|`.
    pub r: Vec<T>,
    /// Action `S = ħ·arg(ψ)` unwrapped from the grid center outward;
    /// `None` where `|ψ|` is below the node threshold.
    pub s: Vec<Option<T>>,
}

const NODE_THRESHOLD: f64 = 1e-12;

/// Split `ψ` into `R` and `S` with nearest-branch phase continuation from
/// the grid center. Reconstruction `R e^{iS/ħ} = ψ` holds on unmasked
/// points.
pub fn decompose<T: Real>(psi: &GridWavefunction<T>) -> Result<HydroFields<T>, MadelungError> {
    let n = psi.values.len();
    let threshold = T::of(NODE_THRESHOLD);
    let r: Vec<T> = psi.values.iter().map(|z| z.norm_sqr().sqrt()).collect();
    if r.iter().all(|&a| a <= threshold) {
        return Err(MadelungError::ZeroNorm);
    }
    let mut s: Vec<Option<T>> = vec![None; n];
    let raw_phase = |z: &Complex<T>| -> T { z.im.atan2(z.re) };

    let center = n / 2;
    let two_pi = T::two_pi();
    // Continue right from the center, then left, skipping masked points and
    // always picking the branch closest to the last unmasked phase.
    let continue_from = |indices: Box<dyn Iterator<Item = usize>>, s: &mut Vec<Option<T>>| {
        let mut prev: Option<T> = None;
        for idx in indices {
            if r[idx] <= threshold {
                continue;
            }
            let theta = raw_phase(&psi.values[idx]);
            let unwrapped = match prev {
                None => theta,
                Some(p) => {
                    let k = ((p - theta) / two_pi).round();
                    theta + two_pi * k
                }
            };
            s[idx] = Some(unwrapped * psi.hbar);
            prev = Some(unwrapped);
        }
    };
    continue_from(Box::new(center..n), &mut s);
    continue_from(Box::new((0..=center).rev()), &mut s);

    Ok(HydroFields {
        positions: psi.positions.clone(),
        dx: psi.dx,
        hbar: psi.hbar,
        mass: psi.mass,
        r,
        s,
    })
}

/// Fraction of the peak amplitude below which `Q` is masked.
const Q_MASK_RELATIVE: f64 = 1e-6;

/// Quantum potential `Q = −(ħ²/2m) R''/R` via a fourth-order central
/// stencil; masked at the two points next to each grid edge and wherever
/// `R` is below `1e-6` of its peak. Uses the fields' own `ħ` and mass.
pub fn quantum_potential<T: Real>(fields: &HydroFields<T>) -> Vec<Option<T>> {
    quantum_potential_with(fields, fields.mass, fields.hbar)
}

/// Quantum potential with explicit `ħ` and mass at fixed amplitude profile;
/// `Q ∝ ħ²` pointwise, which is the classical-limit diagnostic.
pub fn quantum_potential_with<T: Real>(fields: &HydroFields<T>, mass: T, hbar: T) -> Vec<Option<T>> {
    let n = fields.r.len();
    let r = &fields.r;
    let r_max = r.iter().fold(T::zero(), |a, &b| if b > a { b } else { a });
    let mask = r_max * T::of(Q_MASK_RELATIVE);
    let dx2 = fields.dx * fields.dx;
    let prefactor = -(hbar * hbar) / (mass * T::of(2.0));
    let (c0, c1, c2) = (T::of(-30.0 / 12.0), T::of(16.0 / 12.0), T::of(-1.0 / 12.0));
    (0..n)
        .map(|j| {
            if j < 2 || j + 2 >= n || r[j] <= mask {
                return None;
            }
            let second = (c2 * r[j - 2] + c1 * r[j - 1] + c0 * r[j] + c1 * r[j + 1]
                + c2 * r[j + 2])
                / dx2;
            Some(prefactor * second / r[j])
        })
        .collect()
}

/// Momentum field `p = ∂S/∂x` by central differences; masked wherever the
/// stencil touches a masked `S` value or a grid edge.
pub fn momentum_field<T: Real>(fields: &HydroFields<T>) -> Vec<Option<T>> {
    let n = fields.s.len();
    let two_dx = fields.dx * T::of(2.0);
    (0..n)
        .map(|j| {
            if j == 0 || j + 1 >= n {
                return None;
            }
            match (fields.s[j - 1], fields.s[j], fields.s[j + 1]) {
                (Some(sm), Some(_), Some(sp)) => Some((sp - sm) / two_dx),
                _ => None,
            }
        })
        .collect()
}

/// One point of the classical-limit scan.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HbarScanPoint<T> {
    pub hbar: T,
    pub max_abs_q: T,
}

/// Maximum |quantum potential| at fixed amplitude profile for each `ħ` of a
/// strictly decreasing list: `max|Q| ∝ ħ²`, vanishing in the classical
/// limit.
pub fn classical_limit_scan<T: Real>(
    psi: &GridWavefunction<T>,
    hbar_list: &[T],
) -> Result<Vec<HbarScanPoint<T>>, MadelungError> {
    if hbar_list.is_empty()
        || hbar_list.iter().any(|&h| !(h > T::zero()))
        || hbar_list.windows(2).any(|w| !(w[1] < w[0]))
    {
        return Err(MadelungError::BadHbarList);
    }
    let fields = decompose(psi)?;
    Ok(hbar_list
        .iter()
        .map(|&hbar| {
            let q = quantum_potential_with(&fields, psi.mass, hbar);
            let max_abs = q
                .iter()
                .flatten()
                .fold(T::zero(), |a, &v| if v.abs() > a { v.abs() } else { a });
            HbarScanPoint {
                hbar,
                max_abs_q: max_abs,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reconstruct(fields: &HydroFields<f64>, j: usize) -> Option<Complex<f64>> {
        fields.s[j].map(|s| {
            let phase = s / fields.hbar;
            Complex::new(fields.r[j] * phase.cos(), fields.r[j] * phase.sin())
        })
    }

    #[test]
    fn real_gaussian_has_zero_phase() {
        let psi = GridWavefunction::<f64>::gaussian(128, 8.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let fields = decompose(&psi).unwrap();
        for s in fields.s.iter().flatten() {
            assert_relative_eq!(*s, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn plane_wave_phase_is_linear_and_momentum_constant() {
        // e^{ikx}: R constant, S = ħkx (unwrapped across branch cuts),
        // p ≡ ħk.
        let n = 256;
        let k = 2.0;
        let hbar = 0.7;
        let xs = GridWavefunction::<f64>::uniform_grid(n, 6.0);
        let values: Vec<Complex<f64>> = xs
            .iter()
            .map(|&x| Complex::new((k * x).cos(), (k * x).sin()))
            .collect();
        let psi = GridWavefunction::new(xs.clone(), values, hbar, 1.0).unwrap();
        let fields = decompose(&psi).unwrap();
        for (j, s) in fields.s.iter().enumerate() {
            let s = s.expect("plane wave has no nodes");
            assert_relative_eq!(s, hbar * k * xs[j], epsilon = 1e-9, max_relative = 1e-9);
        }
        let p = momentum_field(&fields);
        for v in p.iter().flatten() {
            assert_relative_eq!(*v, hbar * k, epsilon = 1e-8);
        }
        // R is constant → Q ≡ 0 on unmasked points.
        for q in quantum_potential(&fields).iter().flatten() {
            assert!(q.abs() < 1e-8, "Q = {q}");
        }
    }

    #[test]
    fn reconstruction_identity_on_unmasked_points() {
        let psi = GridWavefunction::<f64>::gaussian(200, 10.0, 1.3, 1.7, 0.5, 1.0).unwrap();
        let fields = decompose(&psi).unwrap();
        for j in 0..psi.values().len() {
            if let Some(rec) = reconstruct(&fields, j) {
                let err = (rec - psi.values()[j]).norm_sqr().sqrt();
                assert!(err < 1e-10, "reconstruction error {err} at {j}");
            }
        }
    }

    #[test]
    fn node_masks_phase_but_not_amplitude() {
        let psi =
            GridWavefunction::<f64>::oscillator_first_excited(257, 8.0, 1.0, 1.0, 1.0).unwrap();
        let fields = decompose(&psi).unwrap();
        // Odd grid size puts a point exactly on the node at x = 0.
        let center = 128usize;
        assert!(fields.r[center] < 1e-12);
        assert!(fields.s[center].is_none());
        // Away from the node everything is defined.
        assert!(fields.s[center + 5].is_some());
        assert!(fields.s[center - 5].is_some());
    }

    #[test]
    fn oscillator_ground_state_quantum_potential() {
        // Q(x) = ħω/2 − mω²x²/2 (analytic R''/R for the Gaussian ground
        // state), within 1e-4 relative on interior points.
        let (omega, hbar, mass) = (1.0, 1.0, 1.0);
        let psi =
            GridWavefunction::<f64>::oscillator_ground(512, 8.0, omega, hbar, mass).unwrap();
        let fields = decompose(&psi).unwrap();
        let q = quantum_potential(&fields);
        for (j, &x) in fields.positions.iter().enumerate() {
            if x.abs() > 4.0 {
                continue;
            }
            let expect = hbar * omega / 2.0 - mass * omega * omega * x * x / 2.0;
            let got = q[j].expect("interior point");
            assert!(
                (got - expect).abs() <= 1e-4 * expect.abs().max(1e-12),
                "x = {x}: Q = {got}, expected {expect}"
            );
        }
    }

    #[test]
    fn free_gaussian_quantum_potential() {
        // R ∝ e^{−x²/4σ²} → Q = ħ²/(4mσ²) − ħ²x²/(8mσ⁴).
        let (sigma, hbar, mass) = (1.5, 1.0, 2.0);
        let psi = GridWavefunction::<f64>::gaussian(512, 12.0, sigma, 0.0, hbar, mass).unwrap();
        let fields = decompose(&psi).unwrap();
        let q = quantum_potential(&fields);
        for (j, &x) in fields.positions.iter().enumerate() {
            if x.abs() > 6.0 {
                continue;
            }
            let expect = hbar * hbar / (4.0 * mass * sigma * sigma)
                - hbar * hbar * x * x / (8.0 * mass * sigma.powi(4));
            let got = q[j].expect("interior point");
            assert!(
                (got - expect).abs() <= 1e-4 * expect.abs().max(1e-9),
                "x = {x}: Q = {got}, expected {expect}"
            );
        }
    }

    #[test]
    fn boosted_gaussian_momentum_is_hbar_k() {
        let (k0, hbar) = (2.5, 0.8);
        let psi = GridWavefunction::<f64>::gaussian(400, 10.0, 1.0, k0, hbar, 1.0).unwrap();
        let fields = decompose(&psi).unwrap();
        let p = momentum_field(&fields);
        for (j, v) in p.iter().enumerate() {
            if fields.positions[j].abs() > 5.0 {
                continue;
            }
            if let Some(v) = v {
                assert_relative_eq!(*v, hbar * k0, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn quantum_potential_scales_exactly_as_hbar_squared() {
        let psi = GridWavefunction::<f64>::oscillator_ground(256, 8.0, 1.0, 1.0, 1.0).unwrap();
        let fields = decompose(&psi).unwrap();
        let q1 = quantum_potential_with(&fields, 1.0, 1.0);
        let q_half = quantum_potential_with(&fields, 1.0, 0.5);
        for (a, b) in q1.iter().zip(&q_half) {
            match (a, b) {
                (Some(a), Some(b)) => assert_relative_eq!(*b, 0.25 * a, epsilon = 1e-12),
                (None, None) => {}
                _ => panic!("mask mismatch"),
            }
        }
    }

    #[test]
    fn classical_limit_scan_is_quadratic() {
        let psi = GridWavefunction::<f64>::gaussian(256, 10.0, 1.2, 0.0, 1.0, 1.0).unwrap();
        let scan = classical_limit_scan(&psi, &[1.0, 0.5, 0.25]).unwrap();
        assert_relative_eq!(scan[1].max_abs_q, scan[0].max_abs_q * 0.25, epsilon = 1e-12);
        assert_relative_eq!(scan[2].max_abs_q, scan[0].max_abs_q * 0.0625, epsilon = 1e-12);
        // Log-log slope 2.
        let lx: Vec<f64> = scan.iter().map(|p| p.hbar.ln()).collect();
        let ly: Vec<f64> = scan.iter().map(|p| p.max_abs_q.ln()).collect();
        let fit = crate::stats::linear_fit(&lx, &ly).unwrap();
        assert!((fit.slope - 2.0).abs() < 0.1);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let xs = GridWavefunction::<f64>::uniform_grid(32, 4.0);
        let vals = vec![Complex::new(1.0, 0.0); 32];
        assert!(matches!(
            GridWavefunction::new(xs.clone(), vals.clone(), 0.0, 1.0),
            Err(MadelungError::BadHbar(_))
        ));
        assert!(matches!(
            GridWavefunction::new(xs.clone(), vals.clone(), 1.0, -1.0),
            Err(MadelungError::BadMass(_))
        ));
        let psi = GridWavefunction::new(xs, vals, 1.0, 1.0).unwrap();
        // ħ = 0 in a scan is rejected (and so is a non-decreasing list).
        assert!(matches!(
            classical_limit_scan(&psi, &[1.0, 0.0]),
            Err(MadelungError::BadHbarList)
        ));
        assert!(matches!(
            classical_limit_scan(&psi, &[0.5, 1.0]),
            Err(MadelungError::BadHbarList)
        ));
        assert!(matches!(
            GridWavefunction::<f64>::gaussian(8, 4.0, 1.0, 0.0, 1.0, 1.0),
            Err(MadelungError::GridTooSmall(8))
        ));
    }
}
