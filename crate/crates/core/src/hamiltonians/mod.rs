//! System Hamiltonians: Ising chains, NK-style spin glasses, propagators,
//! and spectral-regime classification.

mod spectral;

pub use spectral::{
    brody_pdf, fit_brody_mle, sample_poisson_spacings, sample_wigner_spacings, BrodyFit,
    SpacingConfig, SpectralRegime, SpectralStats, SpectralWarning,
};

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::random::rng_from_seed;
use crate::scalar::{c_re, Real};

#[derive(Debug, Clone, Error)]
pub enum HamiltonianError {
    #[error("chain length {0} outside supported range 2..=12")]
    LengthOutOfRange(usize),
    #[error("ruggedness K = {k} must be below the site count N = {n}")]
    RuggednessTooLarge { k: usize, n: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix dimension {dim} does not equal 2^{length}")]
    DimensionMismatch { dim: usize, length: usize },
    #[error("matrix is not Hermitian (max deviation {max_dev:.3e})")]
    NotHermitian { max_dev: f64 },
    #[error("dimension {0} too small, need at least 2")]
    DimensionTooSmall(usize),
    #[error("time must be finite")]
    NonFiniteTime,
    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,
    #[error("degenerate spectrum: all level gaps vanish")]
    DegenerateSpectrum,
    #[error("too few spacings ({0}) for a Brody fit")]
    TooFewSpacings(usize),
}

/// Which spin-chain model a matrix was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    IsingZ,
    HeisenbergXyz,
    NkSpinGlass,
    Custom,
}

/// Nearest-neighbor coupling structure of [`build_ising`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsingVariant {
    /// `J Σ σ^z_i σ^z_{i+1}`
    ZOnly,
    /// `J Σ (σ^x σ^x + σ^y σ^y + σ^z σ^z)` over adjacent pairs
    Xyz,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// Construction parameters echoed into run metadata.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HamiltonianParams<T> {
    pub coupling_j: T,
    pub length: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ruggedness_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub transverse_field: T,
    pub boundary: Boundary,
}

/// Hermitian Hamiltonian on a chain of `L` qubits (dimension `2^L`).
#[derive(Clone, Debug)]
pub struct SpinChainHamiltonian<T: Real> {
    matrix: DMatrix<Complex<T>>,
    model_kind: ModelKind,
    params: HamiltonianParams<T>,
}

pub(crate) fn hermiticity_deviation<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    let mut max_dev = T::zero();
    for i in 0..m.nrows() {
        for j in 0..=i {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm_sqr().sqrt();
            if dev > max_dev {
                max_dev = dev;
            }
        }
    }
    max_dev
}

impl<T: Real> SpinChainHamiltonian<T> {
    /// Wrap an externally built Hermitian matrix on `length` qubits.
    pub fn custom(matrix: DMatrix<Complex<T>>, length: usize) -> Result<Self, HamiltonianError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(HamiltonianError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() != 1usize << length {
            return Err(HamiltonianError::DimensionMismatch {
                dim: matrix.nrows(),
                length,
            });
        }
        let dev = hermiticity_deviation(&matrix);
        if dev > T::strict_tol() {
            return Err(HamiltonianError::NotHermitian {
                max_dev: dev.as_f64(),
            });
        }
        Ok(Self {
            matrix,
            model_kind: ModelKind::Custom,
            params: HamiltonianParams {
                coupling_j: T::zero(),
                length,
                ruggedness_k: None,
                seed: None,
                transverse_field: T::zero(),
                boundary: Boundary::Open,
            },
        })
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn model_kind(&self) -> ModelKind {
        self.model_kind
    }

    pub fn params(&self) -> &HamiltonianParams<T> {
        &self.params
    }

    pub fn n_sites(&self) -> usize {
        self.params.length
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// True when every entry is real (within tolerance); such matrices get a
    /// faster real-symmetric eigenvalue path.
    pub fn is_real(&self) -> bool {
        self.matrix
            .iter()
            .all(|z| z.im.abs() <= T::strict_tol())
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<T> {
        let mut evs: Vec<T> = if self.is_real() {
            let real = DMatrix::from_fn(self.dim(), self.dim(), |i, j| self.matrix[(i, j)].re);
            real.symmetric_eigenvalues().iter().cloned().collect()
        } else {
            self.matrix
                .clone()
                .symmetric_eigenvalues()
                .iter()
                .cloned()
                .collect()
        };
        evs.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        evs
    }
}

// Pauli matrices.
pub fn sigma_x<T: Real>() -> DMatrix<Complex<T>> {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex::new(T::zero(), T::zero()),
            Complex::new(T::one(), T::zero()),
            Complex::new(T::one(), T::zero()),
            Complex::new(T::zero(), T::zero()),
        ],
    )
}

pub fn sigma_y<T: Real>() -> DMatrix<Complex<T>> {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex::new(T::zero(), T::zero()),
            Complex::new(T::zero(), -T::one()),
            Complex::new(T::zero(), T::one()),
            Complex::new(T::zero(), T::zero()),
        ],
    )
}

pub fn sigma_z<T: Real>() -> DMatrix<Complex<T>> {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex::new(T::one(), T::zero()),
            Complex::new(T::zero(), T::zero()),
            Complex::new(T::zero(), T::zero()),
            Complex::new(-T::one(), T::zero()),
        ],
    )
}

/// ±1 eigenvalue of `σ^z` for `site` in basis state `index` (site 0 is the
/// leftmost tensor factor).
#[inline]
fn z_sign(index: usize, site: usize, length: usize) -> i64 {
    if (index >> (length - 1 - site)) & 1 == 0 {
        1
    } else {
        -1
    }
}

#[inline]
fn flip(index: usize, site: usize, length: usize) -> usize {
    index ^ (1usize << (length - 1 - site))
}

/// Ising chain with open boundary and no transverse field.
pub fn build_ising<T: Real>(
    length: usize,
    coupling_j: T,
    variant: IsingVariant,
) -> Result<SpinChainHamiltonian<T>, HamiltonianError> {
    build_ising_with(length, coupling_j, variant, T::zero(), Boundary::Open)
}

/// Ising chain with optional uniform transverse field `h Σ σ^x_i` and
/// configurable boundary.
pub fn build_ising_with<T: Real>(
    length: usize,
    coupling_j: T,
    variant: IsingVariant,
    transverse_field: T,
    boundary: Boundary,
) -> Result<SpinChainHamiltonian<T>, HamiltonianError> {
    if !(2..=12).contains(&length) {
        return Err(HamiltonianError::LengthOutOfRange(length));
    }
    let dim = 1usize << length;
    let mut m = DMatrix::from_element(dim, dim, Complex::new(T::zero(), T::zero()));

    let bonds: Vec<(usize, usize)> = {
        let mut b: Vec<(usize, usize)> = (0..length - 1).map(|i| (i, i + 1)).collect();
        if boundary == Boundary::Periodic && length > 2 {
            b.push((length - 1, 0));
        }
        b
    };

    for s in 0..dim {
        for &(i, j) in &bonds {
            let zz = T::of((z_sign(s, i, length) * z_sign(s, j, length)) as f64);
            m[(s, s)] += c_re(coupling_j * zz);
            if variant == IsingVariant::Xyz {
                // σ^x σ^x + σ^y σ^y maps |01⟩ ↔ |10⟩ with amplitude 2 and
                // annihilates aligned pairs.
                if z_sign(s, i, length) != z_sign(s, j, length) {
                    let t = flip(flip(s, i, length), j, length);
                    m[(t, s)] += c_re(coupling_j * T::of(2.0));
                }
            }
        }
        if transverse_field != T::zero() {
            for i in 0..length {
                let t = flip(s, i, length);
                m[(t, s)] += c_re(transverse_field);
            }
        }
    }

    let model_kind = match variant {
        IsingVariant::ZOnly => ModelKind::IsingZ,
        IsingVariant::Xyz => ModelKind::HeisenbergXyz,
    };
    Ok(SpinChainHamiltonian {
        matrix: m,
        model_kind,
        params: HamiltonianParams {
            coupling_j,
            length,
            ruggedness_k: None,
            seed: None,
            transverse_field,
            boundary,
        },
    })
}

/// NK-style spin glass with the default transverse field `h = 1`.
pub fn build_nk_spin_glass<T: Real>(
    n: usize,
    k: usize,
    seed: u64,
) -> Result<SpinChainHamiltonian<T>, HamiltonianError> {
    build_nk_spin_glass_with(n, k, T::one(), seed)
}

/// NK-style spin glass: each site contributes a seeded random energy that
/// depends on its own spin and `K` other randomly chosen spins (diagonal in
/// the σ^z basis), plus a uniform transverse field `h Σ σ^x_i`.
pub fn build_nk_spin_glass_with<T: Real>(
    n: usize,
    k: usize,
    transverse_field: T,
    seed: u64,
) -> Result<SpinChainHamiltonian<T>, HamiltonianError> {
    if !(2..=12).contains(&n) {
        return Err(HamiltonianError::LengthOutOfRange(n));
    }
    if k >= n {
        return Err(HamiltonianError::RuggednessTooLarge { k, n });
    }
    let dim = 1usize << n;
    let mut rng = rng_from_seed(seed);

    // Site i depends on itself plus k distinct random neighbors.
    let mut neighborhoods: Vec<Vec<usize>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        // Partial Fisher-Yates: draw k distinct neighbors.
        for pick in 0..k {
            let j = rng.gen_range(pick..others.len());
            others.swap(pick, j);
        }
        let mut sites = vec![i];
        sites.extend_from_slice(&others[..k]);
        neighborhoods.push(sites);
    }

    // One random energy table per site over its 2^{k+1} local configurations.
    let tables: Vec<Vec<T>> = (0..n)
        .map(|_| {
            (0..1usize << (k + 1))
                .map(|_| T::of(rng.gen::<f64>()))
                .collect()
        })
        .collect();

    let mut m = DMatrix::from_element(dim, dim, Complex::new(T::zero(), T::zero()));
    for s in 0..dim {
        let mut energy = T::zero();
        for i in 0..n {
            let mut key = 0usize;
            for (pos, &site) in neighborhoods[i].iter().enumerate() {
                if (s >> (n - 1 - site)) & 1 == 1 {
                    key |= 1 << pos;
                }
            }
            energy += tables[i][key];
        }
        m[(s, s)] = c_re(energy);
        if transverse_field != T::zero() {
            for i in 0..n {
                let t = flip(s, i, n);
                m[(t, s)] += c_re(transverse_field);
            }
        }
    }

    Ok(SpinChainHamiltonian {
        matrix: m,
        model_kind: ModelKind::NkSpinGlass,
        params: HamiltonianParams {
            coupling_j: T::zero(),
            length: n,
            ruggedness_k: Some(k),
            seed: Some(seed),
            transverse_field,
            boundary: Boundary::Open,
        },
    })
}

/// `U = exp(−iHt)` via eigendecomposition; unitary to within a few ulps of
/// the eigensolver's accuracy.
pub fn propagator<T: Real>(
    h: &SpinChainHamiltonian<T>,
    t: T,
) -> Result<DMatrix<Complex<T>>, HamiltonianError> {
    if !t.is_finite() {
        return Err(HamiltonianError::NonFiniteTime);
    }
    Ok(propagator_of_matrix(h.matrix(), t))
}

/// `exp(−iMt)` for a Hermitian matrix `M`.
pub fn propagator_of_matrix<T: Real>(m: &DMatrix<Complex<T>>, t: T) -> DMatrix<Complex<T>> {
    let eig = m.clone().symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|ev| {
        let angle = -ev * t;
        Complex::new(angle.cos(), angle.sin())
    }));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Complex square matrix with no Hermiticity requirement (effective
/// description of open-system dynamics).
#[derive(Clone, Debug)]
pub struct NonHermitianHamiltonian<T: Real> {
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> NonHermitianHamiltonian<T> {
    pub fn new(matrix: DMatrix<Complex<T>>) -> Result<Self, HamiltonianError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(HamiltonianError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() < 2 {
            return Err(HamiltonianError::DimensionTooSmall(matrix.nrows()));
        }
        Ok(Self { matrix })
    }

    /// The 2×2 PT-symmetric dimer `[[r e^{iθ}, s], [s, r e^{−iθ}]]` whose
    /// eigenvalues `r cos θ ± √(s² − r² sin²θ)` are real iff `s² ≥ r² sin²θ`.
    pub fn pt_dimer(r: T, theta: T, s: T) -> Self {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(r * theta.cos(), r * theta.sin()),
                Complex::new(s, T::zero()),
                Complex::new(s, T::zero()),
                Complex::new(r * theta.cos(), -(r * theta.sin())),
            ],
        );
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues via the complex Schur decomposition.
    pub fn eigenvalues(&self) -> Result<Vec<Complex<T>>, HamiltonianError> {
        let schur = self
            .matrix
            .clone()
            .try_schur(T::of(1e-14), 100_000)
            .ok_or(HamiltonianError::EigenFailure)?;
        let evs = schur.eigenvalues().ok_or(HamiltonianError::EigenFailure)?;
        Ok(evs.iter().cloned().collect())
    }
}

/// Spectrum-reality report for a non-Hermitian Hamiltonian.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PtSpectrumReport<T> {
    pub all_real: bool,
    pub max_imag: T,
}

/// Check whether every eigenvalue satisfies `|Im λ| < tol`.
pub fn pt_spectrum_check<T: Real>(
    h: &NonHermitianHamiltonian<T>,
    tol: T,
) -> Result<PtSpectrumReport<T>, HamiltonianError> {
    let evs = h.eigenvalues()?;
    let max_imag = evs
        .iter()
        .map(|z| z.im.abs())
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    Ok(PtSpectrumReport {
        all_real: max_imag < tol,
        max_imag,
    })
}

/// Level-spacing statistics of a spin-chain Hamiltonian with default
/// unfolding/fit configuration.
pub fn level_spacing_stats<T: Real>(
    h: &SpinChainHamiltonian<T>,
) -> Result<SpectralStats<T>, HamiltonianError> {
    level_spacing_stats_with(h, &SpacingConfig::default())
}

pub fn level_spacing_stats_with<T: Real>(
    h: &SpinChainHamiltonian<T>,
    config: &SpacingConfig<T>,
) -> Result<SpectralStats<T>, HamiltonianError> {
    SpectralStats::from_eigenvalues(h.eigenvalues(), config)
}
