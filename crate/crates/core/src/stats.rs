//! Small statistics toolbox: moments, least squares, rank correlation.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::scalar::Real;

pub fn mean<T: Real>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::zero();
    }
    xs.iter().fold(T::zero(), |a, &b| a + b) / T::of(xs.len() as f64)
}

/// Unbiased sample variance (0 for fewer than two samples).
pub fn variance<T: Real>(xs: &[T]) -> T {
    if xs.len() < 2 {
        return T::zero();
    }
    let m = mean(xs);
    let ss = xs.iter().fold(T::zero(), |a, &b| a + (b - m) * (b - m));
    ss / T::of((xs.len() - 1) as f64)
}

pub fn std_dev<T: Real>(xs: &[T]) -> T {
    variance(xs).sqrt()
}

/// Standard error of the mean.
pub fn sem<T: Real>(xs: &[T]) -> T {
    if xs.len() < 2 {
        return T::zero();
    }
    std_dev(xs) / T::of(xs.len() as f64).sqrt()
}

/// Quantile of a sorted slice by linear interpolation, `q ∈ [0, 1]`.
pub fn quantile_sorted<T: Real>(sorted: &[T], q: T) -> T {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * T::of((n - 1) as f64);
    let lo = pos.floor().to_usize().unwrap_or(0).min(n - 1);
    let hi = (lo + 1).min(n - 1);
    let frac = pos - T::of(lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
}

/// Ordinary least squares line through `(xs, ys)`.
pub fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> Option<LinearFit<T>> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx <= T::zero() {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > T::zero() {
        (sxy * sxy) / (sxx * syy)
    } else {
        T::one()
    };
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Least-squares polynomial fit; returns coefficients lowest order first.
pub fn polyfit<T: Real>(xs: &[T], ys: &[T], degree: usize) -> Option<Vec<T>> {
    if xs.len() != ys.len() || xs.len() <= degree {
        return None;
    }
    let n = xs.len();
    let cols = degree + 1;
    let mut a = DMatrix::from_element(n, cols, T::zero());
    for (i, &x) in xs.iter().enumerate() {
        let mut p = T::one();
        for j in 0..cols {
            a[(i, j)] = p;
            p *= x;
        }
    }
    let b = DVector::from_column_slice(ys);
    let svd = a.svd(true, true);
    let eps = T::of(1e-12);
    let sol = svd.solve(&b, eps).ok()?;
    Some(sol.iter().cloned().collect())
}

pub fn polyval<T: Real>(coeffs: &[T], x: T) -> T {
    let mut acc = T::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Average ranks (1-based), with ties sharing their mean rank.
fn ranks<T: Real>(xs: &[T]) -> Vec<T> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("finite values"));
    let mut out = vec![T::zero(); n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = T::of((i + j) as f64 / 2.0 + 1.0);
        for k in i..=j {
            out[order[k]] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman_rho<T: Real>(xs: &[T], ys: &[T]) -> Option<T> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return None;
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    linear_pearson(&rx, &ry)
}

fn linear_pearson<T: Real>(xs: &[T], ys: &[T]) -> Option<T> {
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxx = T::zero();
    let mut syy = T::zero();
    let mut sxy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= T::zero() || syy <= T::zero() {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// One-sided p-value for observing a Spearman correlation at least as
/// negative as the data's, under the null of exchangeability.
///
/// Exact permutation enumeration for `n ≤ 8`; for larger samples a
/// t-distribution approximation via the normal tail is used.
pub fn spearman_p_negative<T: Real>(xs: &[T], ys: &[T]) -> Option<(T, T)> {
    let n = xs.len();
    let rho_obs = spearman_rho(xs, ys)?;
    if n <= 8 {
        let rx = ranks(xs);
        let ry = ranks(ys);
        let mut idx: Vec<usize> = (0..n).collect();
        let mut le = 0usize;
        let mut total = 0usize;
        let tol = T::of(1e-12);
        permute(&mut idx, 0, &mut |perm| {
            let permuted: Vec<T> = perm.iter().map(|&k| ry[k]).collect();
            if let Some(r) = linear_pearson(&rx, &permuted) {
                if r <= rho_obs + tol {
                    le += 1;
                }
            } else {
                le += 1; // degenerate permutations cannot exceed the observed
            }
            total += 1;
        });
        Some((rho_obs, T::of(le as f64 / total as f64)))
    } else {
        // t = r sqrt((n-2)/(1-r²)), one-sided lower tail, normal approx.
        let nf = T::of((n - 2) as f64);
        let denom = (T::one() - rho_obs * rho_obs).max(T::of(1e-12));
        let t = rho_obs * (nf / denom).sqrt();
        Some((rho_obs, normal_cdf(t)))
    }
}

fn permute<F: FnMut(&[usize])>(idx: &mut Vec<usize>, k: usize, visit: &mut F) {
    if k == idx.len() {
        visit(idx);
        return;
    }
    for i in k..idx.len() {
        idx.swap(k, i);
        permute(idx, k + 1, visit);
        idx.swap(k, i);
    }
}

/// Standard normal CDF via `erfc`-free Abramowitz–Stegun 7.1.26 polynomial.
pub fn normal_cdf<T: Real>(x: T) -> T {
    let half = T::of(0.5);
    let z = x.abs() / T::of(std::f64::consts::SQRT_2);
    let t = T::one() / (T::one() + T::of(0.3275911) * z);
    let poly = t
        * (T::of(0.254829592)
            + t * (T::of(-0.284496736)
                + t * (T::of(1.421413741)
                    + t * (T::of(-1.453152027) + t * T::of(1.061405429)))));
    let erf = T::one() - poly * (-z * z).exp();
    if x >= T::zero() {
        half * (T::one() + erf)
    } else {
        half * (T::one() - erf)
    }
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
pub fn golden_max<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T, iters: usize) -> (T, T) {
    let phi = T::of((5.0f64.sqrt() - 1.0) / 2.0);
    let mut a = lo;
    let mut b = hi;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) * T::of(0.5);
    let fx = f(x);
    (x, fx)
}

/// Histogram over `[lo, hi)` with `bins` equal-width bins; values outside the
/// range are clamped into the edge bins.
pub fn histogram<T: Real>(values: &[T], lo: T, hi: T, bins: usize) -> (Vec<T>, Vec<usize>) {
    assert!(bins > 0 && hi > lo);
    let width = (hi - lo) / T::of(bins as f64);
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = ((v - lo) / width).floor().to_i64().unwrap_or(0);
        let idx = idx.clamp(0, bins as i64 - 1) as usize;
        counts[idx] += 1;
    }
    let edges = (0..=bins).map(|k| lo + width * T::of(k as f64)).collect();
    (edges, counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn linear_fit_recovers_exact_line() {
        let xs: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert_relative_eq!(fit.slope, 3.0, epsilon = 1e-12);
        assert_relative_eq!(fit.intercept, -1.0, epsilon = 1e-12);
        assert_relative_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn polyfit_matches_quadratic() {
        let xs: Vec<f64> = (0..20).map(|k| -1.0 + 0.1 * k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 + x - 0.5 * x * x).collect();
        let c = polyfit(&xs, &ys, 2).unwrap();
        assert_relative_eq!(c[0], 2.0, epsilon = 1e-9);
        assert_relative_eq!(c[1], 1.0, epsilon = 1e-9);
        assert_relative_eq!(c[2], -0.5, epsilon = 1e-9);
        assert_relative_eq!(polyval(&c, 0.3), 2.0 + 0.3 - 0.5 * 0.09, epsilon = 1e-9);
    }

    #[test]
    fn spearman_detects_monotone_decrease() {
        let xs: Vec<f64> = (0..8).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 10.0 - x).collect();
        let (rho, p) = spearman_p_negative(&xs, &ys).unwrap();
        assert_relative_eq!(rho, -1.0, epsilon = 1e-12);
        // Exactly 1 permutation out of 8! is as extreme.
        assert!(p < 0.001, "p = {p}");
    }

    #[test]
    fn spearman_handles_ties() {
        let xs = [1.0f64, 2.0, 3.0, 4.0, 5.0, 6.0];
        let ys = [5.0f64, 5.0, 4.0, 3.0, 2.0, 2.0];
        let (rho, p) = spearman_p_negative(&xs, &ys).unwrap();
        assert!(rho < -0.9);
        assert!(p < 0.05);
    }

    #[test]
    fn golden_max_finds_parabola_peak() {
        let (x, fx) = golden_max(|x: f64| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 60);
        assert_relative_eq!(x, 0.3, epsilon = 1e-9);
        assert!(fx.abs() < 1e-15);
    }

    #[test]
    fn normal_cdf_sanity() {
        assert_relative_eq!(normal_cdf(0.0f64), 0.5, epsilon = 1e-7);
        assert_relative_eq!(normal_cdf(1.6449f64), 0.95, epsilon = 1e-4);
        assert_relative_eq!(normal_cdf(-1.6449f64), 0.05, epsilon = 1e-4);
    }

    #[test]
    fn histogram_counts_everything() {
        let v = [0.1f64, 0.2, 0.9, 1.5, -0.3];
        let (edges, counts) = histogram(&v, 0.0, 1.0, 4);
        assert_eq!(edges.len(), 5);
        assert_eq!(counts.iter().sum::<usize>(), v.len());
    }
}
