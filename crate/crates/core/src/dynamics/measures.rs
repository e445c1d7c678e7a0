//! State-evolution diagnostics over recorded trajectories.

use serde::Serialize;

use super::{DynamicsError, TrajectoryRecord};
use crate::quantum::StateVector;
use crate::scalar::Real;
use crate::stats;

/// Two aggregate measures of how much a state evolved over a time window.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EvolutionMeasures<T> {
    /// Mean over ordered pairs `t ≠ t'` of `1 − |⟨φ_t|φ_{t'}⟩|²`.
    pub pairwise_avg: T,
    /// `1 − (1/T²) ∬ |⟨φ_t|φ_{t'}⟩|² dt' dt` by trapezoidal quadrature
    /// (diagonal included).
    pub double_integral: T,
}

/// Evaluate both evolution measures on a time-indexed list of states.
pub fn evolution_measures<T: Real>(
    states: &[StateVector<T>],
    times: &[T],
) -> Result<EvolutionMeasures<T>, DynamicsError> {
    if states.len() < 2 {
        return Err(DynamicsError::TooFewStates);
    }
    if times.len() != states.len() {
        return Err(DynamicsError::SeriesTooShort {
            len: times.len(),
            window: states.len(),
        });
    }
    for w in times.windows(2) {
        if !(w[1] > w[0]) {
            return Err(DynamicsError::NonMonotoneTimes);
        }
    }
    let n = states.len();
    // Symmetric overlap kernel K_ij = 1 − |⟨φ_i|φ_j⟩|².
    let mut kernel = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let k = T::one() - states[i].overlap(&states[j])?;
            kernel[i][j] = k;
            kernel[j][i] = k;
        }
    }

    let mut pair_sum = T::zero();
    for (i, row) in kernel.iter().enumerate() {
        for (j, &k) in row.iter().enumerate() {
            if i != j {
                pair_sum += k;
            }
        }
    }
    let pairwise_avg = pair_sum / T::of((n * (n - 1)) as f64);

    // Trapezoid weights for possibly nonuniform times.
    let mut w = vec![T::zero(); n];
    let half = T::of(0.5);
    w[0] = (times[1] - times[0]) * half;
    w[n - 1] = (times[n - 1] - times[n - 2]) * half;
    for i in 1..n - 1 {
        w[i] = (times[i + 1] - times[i - 1]) * half;
    }
    let span = times[n - 1] - times[0];
    let mut integral = T::zero();
    for i in 0..n {
        for j in 0..n {
            integral += w[i] * w[j] * kernel[i][j];
        }
    }
    let double_integral = (integral / (span * span)).clamp(T::zero(), T::one());

    Ok(EvolutionMeasures {
        pairwise_avg: pairwise_avg.clamp(T::zero(), T::one()),
        double_integral,
    })
}

/// Oscillation-to-drift diagnostic of an entropy series: the average of the
/// sample standard deviation over sliding windows, divided by the net drift
/// per unit time plus a floor `ε = 1e-9` (so frozen dynamics give 0 instead
/// of 0/0).
pub fn qze_decoherence_ratio<T: Real>(
    entropy: &[T],
    times: &[T],
    window: usize,
) -> Result<T, DynamicsError> {
    if window < 2 || entropy.len() < 2 * window || times.len() != entropy.len() {
        return Err(DynamicsError::SeriesTooShort {
            len: entropy.len(),
            window,
        });
    }
    let n = entropy.len();
    let mut stds = Vec::with_capacity(n - window + 1);
    for start in 0..=(n - window) {
        stds.push(stats::std_dev(&entropy[start..start + window]));
    }
    let avg_std = stats::mean(&stds);
    let span = times[n - 1] - times[0];
    if !(span > T::zero()) {
        return Err(DynamicsError::NonMonotoneTimes);
    }
    let drift = (entropy[n - 1] - entropy[0]).abs() / span;
    Ok(avg_std / (drift + T::of(1e-9)))
}

/// Convenience wrapper over a trajectory record's entropy series.
pub fn qze_decoherence_ratio_of_record<T: Real>(
    record: &TrajectoryRecord<T>,
    window: usize,
) -> Result<T, DynamicsError> {
    qze_decoherence_ratio(&record.half_chain_entropy, &record.times, window)
}
