//! Gaussian-pointer weak measurement.
//!
//! The system couples to a 1-D pointer through the impulse `exp(−i g A ⊗ P)`
//! with `P` the pointer momentum. On the discrete grid the momentum operator
//! is spectral (FFT), so the coupled evolution is exact up to grid
//! truncation: in the eigenbasis of `A`, each eigenvalue `a` translates the
//! pointer wavefunction by `g·a`.

use nalgebra::DMatrix;
use num_complex::Complex;
use rustfft::{FftNum, FftPlanner};
use serde::{Deserialize, Serialize};

use super::tsvf::PrePostSelection;
use super::MeasurementError;
use crate::hamiltonians::hermiticity_deviation;
use crate::io::MatrixJson;
use crate::quantum::StateVector;
use crate::scalar::Real;

/// Symmetric uniform grid of `n` points on `[−extent, extent)` with the
/// periodic convention of the discrete Fourier transform.
#[derive(Clone, Debug, PartialEq)]
pub struct PointerGrid<T> {
    points: Vec<T>,
    dx: T,
}

impl<T: Real> PointerGrid<T> {
    pub fn new(n: usize, extent: T) -> Result<Self, MeasurementError> {
        if n < 16 {
            return Err(MeasurementError::GridTooSmall { need: 16, got: n });
        }
        let dx = extent * T::of(2.0) / T::of(n as f64);
        let points = (0..n)
            .map(|j| -extent + dx * T::of(j as f64))
            .collect();
        Ok(Self { points, dx })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Angular momentum-space frequencies in FFT ordering.
    fn momenta(&self) -> Vec<T> {
        let n = self.points.len();
        let two_pi = T::two_pi();
        let span = self.dx * T::of(n as f64);
        (0..n)
            .map(|k| {
                let k_signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
                two_pi * T::of(k_signed) / span
            })
            .collect()
    }
}

/// A pointer-coupled weak measurement: Hermitian observable `A`, impulse
/// strength `g` (the time-integrated coupling), and a Gaussian pointer of
/// position spread `σ` on a finite grid.
#[derive(Clone, Debug)]
pub struct WeakMeasurementSetup<T: Real> {
    observable: DMatrix<Complex<T>>,
    coupling_g: T,
    pointer_sigma: T,
    grid: PointerGrid<T>,
}

impl<T: Real> WeakMeasurementSetup<T> {
    pub fn new(
        observable: DMatrix<Complex<T>>,
        coupling_g: T,
        pointer_sigma: T,
        grid: PointerGrid<T>,
    ) -> Result<Self, MeasurementError> {
        let dev = hermiticity_deviation(&observable);
        if dev > T::strict_tol() {
            return Err(MeasurementError::NotHermitian {
                max_dev: dev.as_f64(),
            });
        }
        if !(pointer_sigma > T::zero()) || !pointer_sigma.is_finite() {
            return Err(MeasurementError::BadSigma(pointer_sigma.as_f64()));
        }
        if pointer_sigma < T::of(4.0) * grid.dx() {
            return Err(MeasurementError::GridTooCoarse {
                sigma: pointer_sigma.as_f64(),
                dx: grid.dx().as_f64(),
            });
        }
        Ok(Self {
            observable,
            coupling_g,
            pointer_sigma,
            grid,
        })
    }

    /// Default grid: 512 points spanning ±8σ.
    pub fn with_default_grid(
        observable: DMatrix<Complex<T>>,
        coupling_g: T,
        pointer_sigma: T,
    ) -> Result<Self, MeasurementError> {
        let grid = PointerGrid::new(512, T::of(8.0) * pointer_sigma)?;
        Self::new(observable, coupling_g, pointer_sigma, grid)
    }

    pub fn observable(&self) -> &DMatrix<Complex<T>> {
        &self.observable
    }

    pub fn coupling_g(&self) -> T {
        self.coupling_g
    }

    pub fn pointer_sigma(&self) -> T {
        self.pointer_sigma
    }

    pub fn grid(&self) -> &PointerGrid<T> {
        &self.grid
    }

    /// Discrete normalized Gaussian pointer state centered at 0.
    pub fn gaussian_pointer(&self) -> Vec<Complex<T>> {
        let two = T::of(2.0);
        let mut values: Vec<Complex<T>> = self
            .grid
            .points
            .iter()
            .map(|&x| {
                let arg = -(x * x) / (two * self.pointer_sigma * self.pointer_sigma * two);
                Complex::new(arg.exp(), T::zero())
            })
            .collect();
        // |φ(x)|² is a Gaussian of std σ; normalize the discrete mass.
        let mass: T = values.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
        let scale = T::one() / mass.sqrt();
        for v in values.iter_mut() {
            *v *= Complex::new(scale, T::zero());
        }
        values
    }
}

/// Position marginal of the pointer after the measurement kick.
#[derive(Clone, Debug, Serialize)]
pub struct PointerReadout<T> {
    pub positions: Vec<T>,
    /// Discrete probability masses (sum to 1).
    pub probabilities: Vec<T>,
    /// Mean pointer position; equals the shift since the pointer starts at 0.
    pub mean_shift: T,
}

/// Pointer marginal conditioned on a successful post-selection.
#[derive(Clone, Debug, Serialize)]
pub struct PostselectedReadout<T> {
    pub positions: Vec<T>,
    pub probabilities: Vec<T>,
    pub mean_shift: T,
    /// Exact probability that the post-selection succeeds.
    pub postselection_probability: T,
}

/// Eigen-decompose the observable and return, per eigenvalue, the pointer
/// wavefunction translated by `g·a` (spectral shift).
fn shifted_pointers<T: Real + FftNum>(
    setup: &WeakMeasurementSetup<T>,
) -> (Vec<T>, Vec<Vec<Complex<T>>>) {
    let eig = setup.observable.clone().symmetric_eigen();
    let pointer = setup.gaussian_pointer();
    let n = setup.grid.len();
    let momenta = setup.grid.momenta();

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);

    let mut spectrum = pointer.clone();
    fft.process(&mut spectrum);

    let eigenvalues: Vec<T> = eig.eigenvalues.iter().cloned().collect();
    let shifted: Vec<Vec<Complex<T>>> = eigenvalues
        .iter()
        .map(|&a| {
            let shift = setup.coupling_g * a;
            let mut buf: Vec<Complex<T>> = spectrum
                .iter()
                .zip(&momenta)
                .map(|(&z, &p)| {
                    let phase = -p * shift;
                    z * Complex::new(phase.cos(), phase.sin())
                })
                .collect();
            ifft.process(&mut buf);
            let scale = Complex::new(T::one() / T::of(n as f64), T::zero());
            for v in buf.iter_mut() {
                *v *= scale;
            }
            buf
        })
        .collect();
    (eigenvalues, shifted)
}

/// Couple `|Ψ⟩ ⊗ |pointer⟩` through `exp(−i g A ⊗ P)` and trace out the
/// system: the pointer marginal is a mixture of translated Gaussians, one
/// per eigenvalue of `A`, weighted by `|⟨a_k|Ψ⟩|²`.
pub fn weak_measure<T: Real + FftNum>(
    psi: &StateVector<T>,
    setup: &WeakMeasurementSetup<T>,
) -> Result<PointerReadout<T>, MeasurementError> {
    let dim = setup.observable.nrows();
    if psi.dim() != dim {
        return Err(MeasurementError::DimensionMismatch {
            state: psi.dim(),
            operators: dim,
        });
    }
    let eig = setup.observable.clone().symmetric_eigen();
    let coeffs = eig.eigenvectors.adjoint() * psi.amplitudes();
    let (_, shifted) = shifted_pointers(setup);

    let n = setup.grid.len();
    let mut probs = vec![T::zero(); n];
    for (k, pointer_k) in shifted.iter().enumerate() {
        let w = coeffs[k].norm_sqr();
        if w > T::zero() {
            for (p, z) in probs.iter_mut().zip(pointer_k) {
                *p += w * z.norm_sqr();
            }
        }
    }
    let total: T = probs.iter().fold(T::zero(), |a, &b| a + b);
    for p in probs.iter_mut() {
        *p /= total;
    }
    let mean_shift = probs
        .iter()
        .zip(setup.grid.points())
        .fold(T::zero(), |a, (&p, &x)| a + p * x);
    Ok(PointerReadout {
        positions: setup.grid.points().to_vec(),
        probabilities: probs,
        mean_shift,
    })
}

/// Same coupled evolution, then a projective post-selection of the system
/// onto `φ_fin`: the conditional pointer wavefunction is the coherent sum
/// `ξ(x) = Σ_k ⟨φ_fin|a_k⟩⟨a_k|φ_in⟩ φ(x − g a_k)`.
pub fn weak_measure_postselected<T: Real + FftNum>(
    sel: &PrePostSelection<T>,
    setup: &WeakMeasurementSetup<T>,
) -> Result<PostselectedReadout<T>, MeasurementError> {
    let dim = setup.observable.nrows();
    if sel.phi_in().dim() != dim {
        return Err(MeasurementError::DimensionMismatch {
            state: sel.phi_in().dim(),
            operators: dim,
        });
    }
    let eig = setup.observable.clone().symmetric_eigen();
    let c_in = eig.eigenvectors.adjoint() * sel.phi_in().amplitudes();
    let c_fin = eig.eigenvectors.adjoint() * sel.phi_fin().amplitudes();
    let (_, shifted) = shifted_pointers(setup);

    let n = setup.grid.len();
    let mut xi = vec![Complex::new(T::zero(), T::zero()); n];
    for (k, pointer_k) in shifted.iter().enumerate() {
        let w = c_fin[k].conj() * c_in[k];
        if w.norm_sqr() > T::zero() {
            for (acc, z) in xi.iter_mut().zip(pointer_k) {
                *acc += w * *z;
            }
        }
    }
    let p_post: T = xi.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
    if p_post < T::of(1e-300) {
        return Err(MeasurementError::VanishingProbabilities { floor: 1e-300 });
    }
    let probs: Vec<T> = xi.iter().map(|z| z.norm_sqr() / p_post).collect();
    let mean_shift = probs
        .iter()
        .zip(setup.grid.points())
        .fold(T::zero(), |a, (&p, &x)| a + p * x);
    Ok(PostselectedReadout {
        positions: setup.grid.points().to_vec(),
        probabilities: probs,
        mean_shift,
        postselection_probability: p_post,
    })
}

/// Post-selection probability: at first order `|⟨φ_fin|φ_in⟩|²`, exactly the
/// squared norm of the conditional pointer wavefunction from the full
/// coupled evolution. The two agree to `O(g²)`.
pub fn postselection_probability<T: Real + FftNum>(
    sel: &PrePostSelection<T>,
    setup: &WeakMeasurementSetup<T>,
    first_order: bool,
) -> Result<T, MeasurementError> {
    if first_order {
        Ok(sel.first_order_postselection_probability())
    } else {
        Ok(weak_measure_postselected(sel, setup)?.postselection_probability)
    }
}

/// A measurement is weak when the pointer spread exceeds the observable's
/// eigenvalue range scaled by the coupling: `σ > |g| · max_{ij}|λ_i − λ_j|`
/// (strict; ties count as strong).
pub fn weakness_check<T: Real>(setup: &WeakMeasurementSetup<T>) -> bool {
    let evs = setup.observable.clone().symmetric_eigenvalues();
    let mut lo = T::max_value().unwrap();
    let mut hi = -T::max_value().unwrap();
    for &e in evs.iter() {
        if e < lo {
            lo = e;
        }
        if e > hi {
            hi = e;
        }
    }
    setup.pointer_sigma > setup.coupling_g.abs() * (hi - lo)
}

/// Serialized form of a setup (observable in the `{dims, re, im}` schema).
#[derive(Serialize, Deserialize)]
pub struct WeakSetupJson {
    pub observable: MatrixJson,
    pub coupling_g: f64,
    pub pointer_sigma: f64,
    pub grid_points: usize,
    pub grid_extent: f64,
}

impl<T: Real> WeakMeasurementSetup<T> {
    pub fn to_json(&self) -> WeakSetupJson {
        let n = self.observable.nrows();
        WeakSetupJson {
            observable: MatrixJson::from_matrix(vec![n], &self.observable),
            coupling_g: self.coupling_g.as_f64(),
            pointer_sigma: self.pointer_sigma.as_f64(),
            grid_points: self.grid.len(),
            grid_extent: (-self.grid.points()[0]).as_f64(),
        }
    }

    pub fn from_json(raw: &WeakSetupJson) -> Result<Self, MeasurementError> {
        let n = raw.observable.dims.iter().product::<usize>();
        let m = raw
            .observable
            .to_square_matrix::<T>(n)
            .ok_or(MeasurementError::BadOperatorShape {
                index: 0,
                rows: n,
                cols: n,
                dim: n,
            })?;
        let grid = PointerGrid::new(raw.grid_points, T::of(raw.grid_extent))?;
        Self::new(m, T::of(raw.coupling_g), T::of(raw.pointer_sigma), grid)
    }
}
