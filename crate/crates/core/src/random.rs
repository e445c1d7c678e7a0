//! Seeded randomness: stream derivation and random quantum objects.
//!
//! Every stochastic entry point in this crate takes an explicit RNG or seed;
//! concurrent ensembles derive one independent stream per trajectory via
//! [`derive_seed`] so results are reproducible regardless of scheduling.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::quantum::{DensityMatrix, StateVector, SubsystemLayout};
use crate::scalar::Real;

/// splitmix64 finalizer; decorrelates consecutive indices.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent per-index stream seed: `base ⊕ hash(index)`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    base ^ splitmix64(index)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn standard_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let x: f64 = rng.sample(StandardNormal);
    T::of(x)
}

fn complex_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    Complex::new(standard_normal(rng), standard_normal(rng))
}

/// Haar-ish random pure state: normalized complex Gaussian vector.
pub fn random_state<T: Real, R: Rng + ?Sized>(
    layout: SubsystemLayout,
    rng: &mut R,
) -> StateVector<T> {
    let dim = layout.total_dim();
    let v = DVector::from_fn(dim, |_, _| complex_normal(rng));
    StateVector::new(layout, v).expect("gaussian vector has nonzero norm")
}

/// Full-rank random density matrix `G G† / tr(G G†)` (Wishart-like).
pub fn random_density<T: Real, R: Rng + ?Sized>(
    layout: SubsystemLayout,
    rng: &mut R,
) -> DensityMatrix<T> {
    let dim = layout.total_dim();
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_normal::<T, R>(rng));
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m /= Complex::new(tr, T::zero());
    DensityMatrix::new(layout, m).expect("wishart matrix is a valid density matrix")
}

/// Haar-distributed random unitary: QR of a complex Ginibre matrix with the
/// phase convention fixed by the diagonal of R.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex<T>> {
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_normal::<T, R>(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let mag = d.norm_sqr().sqrt();
        let phase = if mag > T::zero() {
            d / Complex::new(mag, T::zero())
        } else {
            Complex::new(T::one(), T::zero())
        };
        for i in 0..dim {
            q[(i, j)] *= phase.conj();
        }
    }
    q
}

/// GUE-style random Hermitian matrix `(G + G†)/2`, scaled by `scale`.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(
    dim: usize,
    scale: T,
    rng: &mut R,
) -> DMatrix<Complex<T>> {
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_normal::<T, R>(rng));
    (&g + g.adjoint()) * Complex::new(scale * T::of(0.5), T::zero())
}

/// Random Kraus set with `n_outcomes` operators on dimension `dim`, built
/// from the block rows of a Haar-random isometry so completeness is exact.
pub fn random_isometry_blocks<T: Real, R: Rng + ?Sized>(
    dim: usize,
    n_outcomes: usize,
    rng: &mut R,
) -> Vec<DMatrix<Complex<T>>> {
    let big = n_outcomes * dim;
    let g = DMatrix::from_fn(big, dim, |_, _| complex_normal::<T, R>(rng));
    let qr = g.qr();
    let q = qr.q(); // big × dim isometry
    (0..n_outcomes)
        .map(|k| q.rows(k * dim, dim).into_owned())
        .collect()
}
