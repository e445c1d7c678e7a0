//! Level-spacing statistics: spectrum unfolding, Brody-parameter fit by
//! maximum likelihood, and the ordered/critical/chaotic classification.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::HamiltonianError;
use crate::scalar::Real;
use crate::stats::{golden_max, polyfit, polyval, variance};

/// Unfolding and classification knobs.
#[derive(Clone, Debug)]
pub struct SpacingConfig<T> {
    /// Degree of the polynomial fit to the integrated level density.
    pub unfold_degree: usize,
    /// Fraction of levels dropped at each spectral edge before spacings are
    /// taken (the polynomial fit is least reliable there).
    pub trim_fraction: T,
    /// `q` below this is classified as ordered.
    pub ordered_max: T,
    /// `q` above this is classified as chaotic.
    pub chaotic_min: T,
    /// Dimensions below this trigger a small-sample warning.
    pub min_dim: usize,
}

impl<T: Real> Default for SpacingConfig<T> {
    fn default() -> Self {
        Self {
            unfold_degree: 5,
            trim_fraction: T::of(0.05),
            ordered_max: T::of(0.3),
            chaotic_min: T::of(0.7),
            min_dim: 32,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralRegime {
    Ordered,
    Critical,
    Chaotic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralWarning {
    /// Too few levels for meaningful statistics.
    SmallSample,
    /// Spacing distribution has (near-)zero variance: the likelihood fit is
    /// degenerate and `brody_q` sits on the boundary.
    DegenerateSpacings,
}

/// Brody parameter and the associated scale from the profile-likelihood fit
/// of `P(s) = (q+1) a s^q exp(−a s^{q+1})`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BrodyFit<T> {
    pub q: T,
    pub a: T,
    pub log_likelihood: T,
}

/// Spectrum, unfolded spacings, and the fitted spectral regime.
#[derive(Clone, Debug)]
pub struct SpectralStats<T> {
    pub eigenvalues: Vec<T>,
    /// Nearest-neighbor gaps after unfolding, normalized to unit mean.
    pub spacings: Vec<T>,
    pub brody_q: T,
    pub brody_a: T,
    pub regime: SpectralRegime,
    pub warnings: Vec<SpectralWarning>,
}

impl<T: Real> SpectralStats<T> {
    /// Unfold a sorted (or unsorted) spectrum and fit the Brody parameter.
    pub fn from_eigenvalues(
        mut eigenvalues: Vec<T>,
        config: &SpacingConfig<T>,
    ) -> Result<Self, HamiltonianError> {
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        let n = eigenvalues.len();
        if n < 4 {
            return Err(HamiltonianError::TooFewSpacings(n.saturating_sub(1)));
        }
        let span = eigenvalues[n - 1] - eigenvalues[0];
        if !(span > T::zero()) {
            return Err(HamiltonianError::DegenerateSpectrum);
        }

        let mut warnings = Vec::new();
        if n < config.min_dim {
            warnings.push(SpectralWarning::SmallSample);
        }

        // Map the spectrum onto [−1, 1] (conditioning of the Vandermonde fit
        // and exact shift/scale invariance of the result).
        let center = (eigenvalues[n - 1] + eigenvalues[0]) * T::of(0.5);
        let half_span = span * T::of(0.5);
        let xs: Vec<T> = eigenvalues
            .iter()
            .map(|&e| (e - center) / half_span)
            .collect();
        let ys: Vec<T> = (0..n).map(|i| T::of(i as f64 + 0.5)).collect();
        let degree = config.unfold_degree.min(n - 2).max(1);
        let coeffs =
            polyfit(&xs, &ys, degree).ok_or(HamiltonianError::DegenerateSpectrum)?;
        let unfolded: Vec<T> = xs.iter().map(|&x| polyval(&coeffs, x)).collect();

        // Trim the spectral edges, diff, drop non-monotone artifacts.
        let trim = ((T::of(n as f64) * config.trim_fraction).as_f64() as usize).min(n / 4);
        let bulk = &unfolded[trim..n - trim];
        let mut spacings: Vec<T> = bulk
            .windows(2)
            .map(|w| {
                let d = w[1] - w[0];
                if d < T::zero() {
                    T::zero()
                } else {
                    d
                }
            })
            .collect();
        let mean = crate::stats::mean(&spacings);
        if !(mean > T::zero()) {
            return Err(HamiltonianError::DegenerateSpectrum);
        }
        for s in spacings.iter_mut() {
            *s /= mean;
        }

        if variance(&spacings) < T::of(1e-10) {
            warnings.push(SpectralWarning::DegenerateSpacings);
        }

        let fit = fit_brody_mle(&spacings)?;
        let regime = classify(fit.q, config);
        Ok(Self {
            eigenvalues,
            spacings,
            brody_q: fit.q,
            brody_a: fit.a,
            regime,
            warnings,
        })
    }

    /// Fit pre-computed spacing samples directly (normalizing their mean),
    /// skipping the unfolding step. Used for synthetic reference ensembles.
    pub fn from_spacings(
        spacings: Vec<T>,
        config: &SpacingConfig<T>,
    ) -> Result<Self, HamiltonianError> {
        let mean = crate::stats::mean(&spacings);
        if !(mean > T::zero()) {
            return Err(HamiltonianError::DegenerateSpectrum);
        }
        let normalized: Vec<T> = spacings.iter().map(|&s| s / mean).collect();
        let mut warnings = Vec::new();
        if normalized.len() < config.min_dim {
            warnings.push(SpectralWarning::SmallSample);
        }
        if variance(&normalized) < T::of(1e-10) {
            warnings.push(SpectralWarning::DegenerateSpacings);
        }
        let fit = fit_brody_mle(&normalized)?;
        let regime = classify(fit.q, config);
        Ok(Self {
            eigenvalues: Vec::new(),
            spacings: normalized,
            brody_q: fit.q,
            brody_a: fit.a,
            regime,
            warnings,
        })
    }

    pub fn is_degenerate(&self) -> bool {
        self.warnings.contains(&SpectralWarning::DegenerateSpacings)
    }
}

fn classify<T: Real>(q: T, config: &SpacingConfig<T>) -> SpectralRegime {
    if q < config.ordered_max {
        SpectralRegime::Ordered
    } else if q > config.chaotic_min {
        SpectralRegime::Chaotic
    } else {
        SpectralRegime::Critical
    }
}

/// Maximum-likelihood Brody fit on `q ∈ [0, 1]`.
///
/// For fixed `q` the scale has the closed-form maximizer
/// `a(q) = n / Σ s_i^{q+1}`, so only the profile likelihood in `q` needs a
/// one-dimensional search (coarse grid plus golden-section refinement).
pub fn fit_brody_mle<T: Real>(spacings: &[T]) -> Result<BrodyFit<T>, HamiltonianError> {
    let samples: Vec<T> = spacings
        .iter()
        .copied()
        .filter(|&s| s > T::of(1e-300))
        .collect();
    if samples.len() < 4 {
        return Err(HamiltonianError::TooFewSpacings(samples.len()));
    }
    let n = T::of(samples.len() as f64);
    let sum_ln: T = samples.iter().fold(T::zero(), |acc, &s| acc + s.ln());

    let profile = |q: T| -> T {
        let qp1 = q + T::one();
        let sum_pow: T = samples
            .iter()
            .fold(T::zero(), |acc, &s| acc + s.powf(qp1));
        // ℓ(q) = n ln(q+1) + n ln(n / Σ s^{q+1}) + q Σ ln s − n
        n * qp1.ln() + n * (n / sum_pow).ln() + q * sum_ln - n
    };

    // Coarse scan to bracket the maximum, then refine.
    let grid = 40usize;
    let mut best_k = 0usize;
    let mut best_val = T::min_value().unwrap();
    for k in 0..=grid {
        let q = T::of(k as f64 / grid as f64);
        let v = profile(q);
        if v > best_val {
            best_val = v;
            best_k = k;
        }
    }
    let lo = T::of(best_k.saturating_sub(1) as f64 / grid as f64);
    let hi = T::of(((best_k + 1).min(grid)) as f64 / grid as f64);
    let (q, ll) = golden_max(profile, lo, hi, 80);
    let q = q.clamp(T::zero(), T::one());
    let qp1 = q + T::one();
    let sum_pow: T = samples
        .iter()
        .fold(T::zero(), |acc, &s| acc + s.powf(qp1));
    Ok(BrodyFit {
        q,
        a: n / sum_pow,
        log_likelihood: ll,
    })
}

/// Brody probability density with explicit parameters.
pub fn brody_pdf<T: Real>(q: T, a: T, s: T) -> T {
    let qp1 = q + T::one();
    qp1 * a * s.powf(q) * (-(a * s.powf(qp1))).exp()
}

/// Poisson (uncorrelated-level) spacing samples: `s = −ln(1 − u)`.
/// This is the Brody distribution at `q = 0`.
pub fn sample_poisson_spacings<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<T> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            T::of(-(1.0 - u).ln())
        })
        .collect()
}

/// Wigner-surmise spacing samples via inverse transform of
/// `P(s) = (π/2) s exp(−π s²/4)`: `s = √(−4 ln(1 − u) / π)`.
/// This is the Brody distribution at `q = 1`.
pub fn sample_wigner_spacings<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<T> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            T::of((-4.0 * (1.0 - u).ln() / std::f64::consts::PI).sqrt())
        })
        .collect()
}
