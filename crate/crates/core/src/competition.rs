//! Event-driven competition between candidate bases: amplitudes grow by a
//! fixed increment on Poisson-timed actualization events, decay
//! exponentially between events, and are wiped by temperature-driven
//! erasure events, until one basis dominates or the horizon is reached.
//!
//! Mathematically each amplitude is a linear shot-noise process, so the
//! stationary mean of a lone basis has the closed form `δF/λ` used as the
//! calibration oracle.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::random::{derive_seed, rng_from_seed};
use crate::scalar::Real;
use crate::stats::{self, LinearFit};

#[derive(Debug, Clone, Error)]
pub enum CompetitionError {
    #[error("need at least one candidate basis")]
    NoBases,
    #[error("amplitude increment must be positive, got {0}")]
    BadIncrement(f64),
    #[error("decay rate must be nonnegative and finite, got {0}")]
    BadDecayRate(f64),
    #[error("event rate F = c·N must be positive and finite, got {0}")]
    BadEventRate(f64),
    #[error("selection floor must lie in (0, 1], got {0}")]
    BadFloor(f64),
    #[error("softmax inverse temperature must be finite, got {0}")]
    BadBeta(f64),
    #[error("temperature must be nonnegative and finite, got {0}")]
    BadTemperature(f64),
    #[error("erasure coefficient must be nonnegative and finite, got {0}")]
    BadKappa(f64),
    #[error("dominance threshold must be positive, got {0}")]
    BadThreshold(f64),
    #[error("horizon must be positive and finite, got {0}")]
    BadHorizon(f64),
    #[error("initial amplitudes must be nonnegative and match the basis count")]
    BadInitialAmplitudes,
    #[error("stationary window fraction must lie in [0, 1), got {0}")]
    BadWindowFraction(f64),
    #[error("decay rate is zero: no equilibrium amplitude exists (unbounded growth)")]
    UnboundedEquilibrium,
    #[error("need at least one record")]
    NoRecords,
    #[error("need at least two distinct N values for a scaling fit")]
    DegenerateScaling,
    #[error("temperature list must be strictly increasing")]
    UnsortedTemperatures,
}

/// How the actualization event picks its basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelectionRule<T> {
    /// Probability ∝ `A_b + η·δ`; the floor guarantees escape from the
    /// all-zero state.
    ProportionalWithFloor { eta: T },
    /// Probability ∝ `exp(β A_b)`.
    Softmax { beta: T },
    Uniform,
}

/// Full parameter set of one competition run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + serde::Deserialize<'de>"))]
pub struct CompetitionConfig<T: Real> {
    /// Number of candidate bases (desk-scale stand-in for the exponentially
    /// many bases of a real composite system). `1` runs a single-basis
    /// calibration process.
    pub n_bases: usize,
    /// Amplitude increment per actualization event.
    pub delta: T,
    /// Exponential decay rate between events.
    pub lambda: T,
    /// Event-rate constant: the Poisson rate is `F = c·N`.
    pub rate_constant_c: T,
    /// Number of entangled variables feeding the event rate.
    pub n_variables: usize,
    pub selection: SelectionRule<T>,
    /// Temperature; erasure events arrive at rate `κ·T`.
    #[serde(default = "zero_default")]
    pub temperature: T,
    /// Erasure rate coefficient κ.
    #[serde(default = "one_default")]
    pub erasure_kappa: T,
    /// A basis dominates once its amplitude reaches this threshold and twice
    /// the runner-up. Use `infinity` to disable early stopping.
    pub dominance_threshold: T,
    /// Wall-clock end of the run.
    pub horizon: T,
    /// Optional initial amplitudes (defaults to all zeros).
    #[serde(default)]
    pub initial_amplitudes: Option<Vec<T>>,
    /// Record the full event log (disable for large ensembles).
    #[serde(default = "true_default")]
    pub log_events: bool,
    /// Fraction of the horizon to discard before accumulating stationary
    /// time averages.
    #[serde(default = "half_default")]
    pub stationary_fraction: T,
    #[serde(default)]
    pub seed: u64,
}

fn zero_default<T: Real>() -> T {
    T::zero()
}
fn one_default<T: Real>() -> T {
    T::one()
}
fn half_default<T: Real>() -> T {
    T::of(0.5)
}
fn true_default() -> bool {
    true
}

impl<T: Real> CompetitionConfig<T> {
    /// Poisson rate of actualization events, `F = c·N`.
    pub fn event_rate(&self) -> T {
        self.rate_constant_c * T::of(self.n_variables as f64)
    }

    pub fn validate(&self) -> Result<(), CompetitionError> {
        if self.n_bases == 0 {
            return Err(CompetitionError::NoBases);
        }
        if !(self.delta > T::zero()) || !self.delta.is_finite() {
            return Err(CompetitionError::BadIncrement(self.delta.as_f64()));
        }
        if self.lambda < T::zero() || !self.lambda.is_finite() {
            return Err(CompetitionError::BadDecayRate(self.lambda.as_f64()));
        }
        let f = self.event_rate();
        if !(f > T::zero()) || !f.is_finite() || self.n_variables == 0 {
            return Err(CompetitionError::BadEventRate(f.as_f64()));
        }
        match self.selection {
            SelectionRule::ProportionalWithFloor { eta } => {
                if !(eta > T::zero()) || eta > T::one() {
                    return Err(CompetitionError::BadFloor(eta.as_f64()));
                }
            }
            SelectionRule::Softmax { beta } => {
                if !beta.is_finite() {
                    return Err(CompetitionError::BadBeta(beta.as_f64()));
                }
            }
            SelectionRule::Uniform => {}
        }
        if self.temperature < T::zero() || !self.temperature.is_finite() {
            return Err(CompetitionError::BadTemperature(self.temperature.as_f64()));
        }
        if self.erasure_kappa < T::zero() || !self.erasure_kappa.is_finite() {
            return Err(CompetitionError::BadKappa(self.erasure_kappa.as_f64()));
        }
        if !(self.dominance_threshold > T::zero()) {
            return Err(CompetitionError::BadThreshold(
                self.dominance_threshold.as_f64(),
            ));
        }
        if !(self.horizon > T::zero()) || !self.horizon.is_finite() {
            return Err(CompetitionError::BadHorizon(self.horizon.as_f64()));
        }
        if let Some(init) = &self.initial_amplitudes {
            if init.len() != self.n_bases || init.iter().any(|&a| a < T::zero() || !a.is_finite())
            {
                return Err(CompetitionError::BadInitialAmplitudes);
            }
        }
        if self.stationary_fraction < T::zero() || self.stationary_fraction >= T::one() {
            return Err(CompetitionError::BadWindowFraction(
                self.stationary_fraction.as_f64(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    Actualization { basis: usize },
    Erasure,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompetitionEvent<T> {
    pub time: T,
    pub kind: EventKind,
    pub amplitudes_after: Vec<T>,
}

/// Outcome of one run.
#[derive(Clone, Debug, Serialize)]
pub struct CompetitionRecord<T> {
    /// Event log (empty when `log_events` is off).
    pub events: Vec<CompetitionEvent<T>>,
    pub winner: Option<usize>,
    pub time_to_dominance: Option<T>,
    pub final_amplitudes: Vec<T>,
    /// Wall time at which the run ended (dominance or horizon).
    pub duration: T,
    /// Time-averaged amplitudes over the stationary window (only meaningful
    /// for runs that reach the horizon).
    pub stationary_means: Vec<T>,
    pub n_actualizations: usize,
    pub n_erasures: usize,
    pub seed: u64,
}

/// Selection probabilities given current amplitudes; winner-take-all rules
/// are non-decreasing in the amplitude.
pub fn selection_probabilities<T: Real>(
    amplitudes: &[T],
    rule: &SelectionRule<T>,
    delta: T,
) -> Vec<T> {
    let k = amplitudes.len();
    let weights: Vec<T> = match *rule {
        SelectionRule::ProportionalWithFloor { eta } => amplitudes
            .iter()
            .map(|&a| a + eta * delta)
            .collect(),
        SelectionRule::Softmax { beta } => {
            // Shift by the max for overflow safety.
            let m = amplitudes
                .iter()
                .fold(-T::max_value().unwrap(), |acc, &a| if a > acc { a } else { acc });
            amplitudes.iter().map(|&a| (beta * (a - m)).exp()).collect()
        }
        SelectionRule::Uniform => vec![T::one(); k],
    };
    let total: T = weights.iter().fold(T::zero(), |a, &b| a + b);
    weights.iter().map(|&w| w / total).collect()
}

fn sample_index<T: Real, R: Rng + ?Sized>(probs: &[T], rng: &mut R) -> usize {
    let u = T::of(rng.gen::<f64>());
    let mut acc = T::zero();
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    probs.len() - 1
}

fn sample_exponential<T: Real, R: Rng + ?Sized>(rate: T, rng: &mut R) -> T {
    // rate = 0 → never.
    if !(rate > T::zero()) {
        return T::max_value().unwrap();
    }
    let u: f64 = rng.gen();
    -T::of((1.0 - u).ln()) / rate
}

/// Simulate one run with an explicit RNG.
pub fn simulate_competition<T: Real, R: Rng + ?Sized>(
    config: &CompetitionConfig<T>,
    rng: &mut R,
) -> Result<CompetitionRecord<T>, CompetitionError> {
    config.validate()?;
    let k = config.n_bases;
    let f = config.event_rate();
    let erasure_rate = config.erasure_kappa * config.temperature;
    let burn_in = config.horizon * config.stationary_fraction;

    let mut amps: Vec<T> = config
        .initial_amplitudes
        .clone()
        .unwrap_or_else(|| vec![T::zero(); k]);
    let mut t = T::zero();
    let mut events = Vec::new();
    let mut winner = None;
    let mut time_to_dominance = None;
    let mut n_actualizations = 0usize;
    let mut n_erasures = 0usize;
    // ∫ A_b dt over [burn_in, horizon], accumulated exactly per interval.
    let mut stationary_integral = vec![T::zero(); k];

    let mut next_event = t + sample_exponential(f, rng);
    let mut next_erasure = t + sample_exponential(erasure_rate, rng);

    loop {
        let t_next = next_event.min(next_erasure).min(config.horizon);
        accumulate_window(
            &mut stationary_integral,
            &amps,
            config.lambda,
            t,
            t_next,
            burn_in,
        );
        decay_amplitudes(&mut amps, config.lambda, t_next - t);
        t = t_next;

        if t >= config.horizon {
            break;
        }
        if next_erasure <= next_event {
            // Temperature noise wipes all accrued amplitudes.
            for a in amps.iter_mut() {
                *a = T::zero();
            }
            n_erasures += 1;
            if config.log_events {
                events.push(CompetitionEvent {
                    time: t,
                    kind: EventKind::Erasure,
                    amplitudes_after: amps.clone(),
                });
            }
            next_erasure = t + sample_exponential(erasure_rate, rng);
        } else {
            let probs = selection_probabilities(&amps, &config.selection, config.delta);
            let basis = sample_index(&probs, rng);
            amps[basis] += config.delta;
            n_actualizations += 1;
            if config.log_events {
                events.push(CompetitionEvent {
                    time: t,
                    kind: EventKind::Actualization { basis },
                    amplitudes_after: amps.clone(),
                });
            }
            next_event = t + sample_exponential(f, rng);

            if let Some(b) = dominant_basis(&amps, config.dominance_threshold) {
                winner = Some(b);
                time_to_dominance = Some(t);
                break;
            }
        }
    }

    let window = config.horizon - burn_in;
    let stationary_means = stationary_integral
        .iter()
        .map(|&s| if window > T::zero() { s / window } else { T::zero() })
        .collect();

    Ok(CompetitionRecord {
        events,
        winner,
        time_to_dominance,
        final_amplitudes: amps,
        duration: t,
        stationary_means,
        n_actualizations,
        n_erasures,
        seed: 0,
    })
}

/// Simulate using the config's own seed.
pub fn run_competition<T: Real>(
    config: &CompetitionConfig<T>,
) -> Result<CompetitionRecord<T>, CompetitionError> {
    let mut rng = rng_from_seed(config.seed);
    let mut record = simulate_competition(config, &mut rng)?;
    record.seed = config.seed;
    Ok(record)
}

/// Independent ensemble with per-run derived seeds.
pub fn run_competition_ensemble<T: Real + Send + Sync>(
    config: &CompetitionConfig<T>,
    n_runs: usize,
) -> Result<Vec<CompetitionRecord<T>>, CompetitionError> {
    (0..n_runs as u64)
        .into_par_iter()
        .map(|k| {
            let seed = derive_seed(config.seed, k);
            let mut rng = rng_from_seed(seed);
            let mut r = simulate_competition(config, &mut rng)?;
            r.seed = seed;
            Ok(r)
        })
        .collect()
}

/// Dominance: the leading amplitude reaches the threshold and at least twice
/// the runner-up (margin prevents declaring a dead heat).
fn dominant_basis<T: Real>(amps: &[T], threshold: T) -> Option<usize> {
    let mut best = 0usize;
    for (i, &a) in amps.iter().enumerate() {
        if a > amps[best] {
            best = i;
        }
    }
    let runner_up = amps
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, &a)| a)
        .fold(T::zero(), |acc, a| if a > acc { a } else { acc });
    if amps[best] >= threshold && amps[best] >= runner_up * T::of(2.0) {
        Some(best)
    } else {
        None
    }
}

fn decay_amplitudes<T: Real>(amps: &mut [T], lambda: T, dt: T) {
    if lambda > T::zero() && dt > T::zero() {
        let factor = (-lambda * dt).exp();
        for a in amps.iter_mut() {
            *a *= factor;
        }
    }
}

/// Add `∫ A(t) dt` over the part of `[t0, t1]` past `burn_in`, analytically
/// per decay segment.
fn accumulate_window<T: Real>(
    integral: &mut [T],
    amps: &[T],
    lambda: T,
    t0: T,
    t1: T,
    burn_in: T,
) {
    let lo = if t0 > burn_in { t0 } else { burn_in };
    if t1 <= lo {
        return;
    }
    // Amplitude at lo, then integrate the decay over [lo, t1].
    let lead = lo - t0;
    let span = t1 - lo;
    if lambda > T::zero() {
        let at_lo = (-lambda * lead).exp();
        let seg = (T::one() - (-lambda * span).exp()) / lambda;
        for (acc, &a) in integral.iter_mut().zip(amps) {
            *acc += a * at_lo * seg;
        }
    } else {
        for (acc, &a) in integral.iter_mut().zip(amps) {
            *acc += a * span;
        }
    }
}

/// Which analytic equilibrium is requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumSchedule {
    /// Stationary mean of the Poisson-driven process: `δF/λ`.
    PoissonMean,
    /// Fixed point of the deterministic periodic map `A ← (A+δ)e^{−λ/F}`:
    /// `δ/(e^{λ/F} − 1)`.
    PeriodicFixedPoint,
}

/// Equilibrium amplitude where exponential loss balances the mean gain.
/// The two schedules agree to `O(λ/F)` and both tend to `δF/λ` as `λ/F → 0`.
pub fn equilibrium_amplitude<T: Real>(
    delta: T,
    lambda: T,
    event_rate: T,
    schedule: EquilibriumSchedule,
) -> Result<T, CompetitionError> {
    if !(delta > T::zero()) {
        return Err(CompetitionError::BadIncrement(delta.as_f64()));
    }
    if !(event_rate > T::zero()) || !event_rate.is_finite() {
        return Err(CompetitionError::BadEventRate(event_rate.as_f64()));
    }
    if !(lambda > T::zero()) {
        return Err(CompetitionError::UnboundedEquilibrium);
    }
    Ok(match schedule {
        EquilibriumSchedule::PoissonMean => delta * event_rate / lambda,
        EquilibriumSchedule::PeriodicFixedPoint => {
            delta / ((lambda / event_rate).exp() - T::one())
        }
    })
}

/// One point of the N-scaling curve.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScalingPoint<T> {
    pub n_variables: usize,
    pub event_rate: T,
    pub mean_max_amplitude: T,
    pub sem: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct NScalingCurve<T> {
    pub points: Vec<ScalingPoint<T>>,
    /// Least-squares fit of mean max amplitude against N; `None` (flagged
    /// degenerate) when fewer than two distinct N values were given.
    pub fit: Option<LinearFit<T>>,
}

/// Sweep the number of variables: event rate `F = c·N`, dominance stopping
/// disabled so every run reaches its stationary window; reports the ensemble
/// mean of the per-run stationary maximum amplitude and a linear fit.
pub fn n_scaling_curve<T: Real + Send + Sync>(
    template: &CompetitionConfig<T>,
    n_values: &[usize],
    runs_per_n: usize,
) -> Result<NScalingCurve<T>, CompetitionError> {
    if n_values.is_empty() {
        return Err(CompetitionError::DegenerateScaling);
    }
    let mut points = Vec::with_capacity(n_values.len());
    for (idx, &n) in n_values.iter().enumerate() {
        let mut config = template.clone();
        config.n_variables = n;
        config.dominance_threshold = T::max_value().unwrap();
        config.log_events = false;
        config.seed = derive_seed(template.seed, idx as u64);
        config.validate()?;
        let records = run_competition_ensemble(&config, runs_per_n)?;
        let maxima: Vec<T> = records
            .iter()
            .map(|r| {
                r.stationary_means
                    .iter()
                    .fold(T::zero(), |a, &b| if b > a { b } else { a })
            })
            .collect();
        points.push(ScalingPoint {
            n_variables: n,
            event_rate: config.event_rate(),
            mean_max_amplitude: stats::mean(&maxima),
            sem: stats::sem(&maxima),
        });
    }
    let xs: Vec<T> = points.iter().map(|p| T::of(p.n_variables as f64)).collect();
    let ys: Vec<T> = points.iter().map(|p| p.mean_max_amplitude).collect();
    let distinct = {
        let mut v: Vec<usize> = n_values.to_vec();
        v.sort_unstable();
        v.dedup();
        v.len()
    };
    let fit = if distinct >= 2 {
        stats::linear_fit(&xs, &ys)
    } else {
        None
    };
    Ok(NScalingCurve { points, fit })
}

/// One temperature point of the sweep.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TemperaturePoint<T> {
    pub temperature: T,
    pub dominance_probability: T,
    pub mean_time_to_dominance: Option<T>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TemperatureSweep<T> {
    pub points: Vec<TemperaturePoint<T>>,
    /// Midpoint of the steepest drop in dominance probability: a finite
    /// transition-temperature estimate.
    pub transition_estimate: Option<T>,
    pub spearman_rho: Option<T>,
    /// One-sided p-value for a negative trend (exact permutation test for
    /// eight or fewer temperatures).
    pub spearman_p_negative: Option<T>,
}

/// Dominance probability and time-to-dominance as a function of temperature.
pub fn temperature_sweep<T: Real + Send + Sync>(
    template: &CompetitionConfig<T>,
    temperatures: &[T],
    runs_per_point: usize,
) -> Result<TemperatureSweep<T>, CompetitionError> {
    if temperatures.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CompetitionError::UnsortedTemperatures);
    }
    let mut points = Vec::with_capacity(temperatures.len());
    for (idx, &temp) in temperatures.iter().enumerate() {
        let mut config = template.clone();
        config.temperature = temp;
        config.log_events = false;
        config.seed = derive_seed(template.seed, 1000 + idx as u64);
        config.validate()?;
        let records = run_competition_ensemble(&config, runs_per_point)?;
        let dominated: Vec<&CompetitionRecord<T>> =
            records.iter().filter(|r| r.winner.is_some()).collect();
        let p = T::of(dominated.len() as f64 / records.len() as f64);
        let mean_ttd = if dominated.is_empty() {
            None
        } else {
            let times: Vec<T> = dominated
                .iter()
                .filter_map(|r| r.time_to_dominance)
                .collect();
            Some(stats::mean(&times))
        };
        points.push(TemperaturePoint {
            temperature: temp,
            dominance_probability: p,
            mean_time_to_dominance: mean_ttd,
        });
    }

    let transition_estimate = points
        .windows(2)
        .map(|w| {
            let drop = w[0].dominance_probability - w[1].dominance_probability;
            let mid = (w[0].temperature + w[1].temperature) * T::of(0.5);
            (drop, mid)
        })
        .filter(|(drop, _)| *drop > T::zero())
        .max_by(|a, b| a.0.partial_cmp(&b.0).expect("finite drops"))
        .map(|(_, mid)| mid);

    let ts: Vec<T> = points.iter().map(|p| p.temperature).collect();
    let ps: Vec<T> = points.iter().map(|p| p.dominance_probability).collect();
    let (rho, pval) = match stats::spearman_p_negative(&ts, &ps) {
        Some((r, p)) => (Some(r), Some(p)),
        None => (None, None),
    };

    Ok(TemperatureSweep {
        points,
        transition_estimate,
        spearman_rho: rho,
        spearman_p_negative: pval,
    })
}

/// Winner histogram and dominance-time quantiles over an ensemble.
#[derive(Clone, Debug, Serialize)]
pub struct SymmetryBreakingStats<T> {
    /// Wins per basis index.
    pub winner_counts: Vec<usize>,
    /// Runs that ended at the horizon without a dominant basis.
    pub none_count: usize,
    /// `[min, q25, median, q75, max]` of time-to-dominance among winners.
    pub time_quantiles: Option<[T; 5]>,
}

pub fn symmetry_breaking_stats<T: Real>(
    records: &[CompetitionRecord<T>],
) -> Result<SymmetryBreakingStats<T>, CompetitionError> {
    if records.is_empty() {
        return Err(CompetitionError::NoRecords);
    }
    let k = records[0].final_amplitudes.len();
    let mut winner_counts = vec![0usize; k];
    let mut none_count = 0usize;
    let mut times = Vec::new();
    for r in records {
        match r.winner {
            Some(b) => {
                winner_counts[b] += 1;
                if let Some(t) = r.time_to_dominance {
                    times.push(t);
                }
            }
            None => none_count += 1,
        }
    }
    let time_quantiles = if times.is_empty() {
        None
    } else {
        times.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
        Some([
            times[0],
            stats::quantile_sorted(&times, T::of(0.25)),
            stats::quantile_sorted(&times, T::of(0.5)),
            stats::quantile_sorted(&times, T::of(0.75)),
            times[times.len() - 1],
        ])
    };
    Ok(SymmetryBreakingStats {
        winner_counts,
        none_count,
        time_quantiles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn base_config() -> CompetitionConfig<f64> {
        CompetitionConfig {
            n_bases: 2,
            delta: 1.0,
            lambda: 1.0,
            rate_constant_c: 10.0,
            n_variables: 1,
            selection: SelectionRule::ProportionalWithFloor { eta: 0.1 },
            temperature: 0.0,
            erasure_kappa: 1.0,
            dominance_threshold: f64::INFINITY,
            horizon: 100.0,
            initial_amplitudes: None,
            log_events: true,
            stationary_fraction: 0.5,
            seed: 1,
        }
    }

    #[test]
    fn no_decay_single_basis_counts_events() {
        // λ = 0, K = 1: amplitude after n events is exactly n·δ.
        let mut c = base_config();
        c.n_bases = 1;
        c.lambda = 0.0;
        c.delta = 0.25;
        c.horizon = 20.0;
        let r = run_competition(&c).unwrap();
        assert_relative_eq!(
            r.final_amplitudes[0],
            0.25 * r.n_actualizations as f64,
            epsilon = 1e-12
        );
        assert!(r.n_actualizations > 0);
    }

    #[test]
    fn amplitudes_decay_exactly_between_events() {
        let mut c = base_config();
        c.horizon = 10.0;
        c.seed = 5;
        let r = run_competition(&c).unwrap();
        // Reconstruct: between consecutive events amplitudes scale by
        // e^{−λ(t₂−t₁)}, then the chosen basis gains δ.
        let mut prev_t = 0.0f64;
        let mut prev_amps = vec![0.0f64; 2];
        for ev in &r.events {
            let factor = (-(ev.time - prev_t)).exp();
            let decayed: Vec<f64> = prev_amps.iter().map(|a| a * factor).collect();
            match ev.kind {
                EventKind::Actualization { basis } => {
                    for (i, (&after, &dec)) in
                        ev.amplitudes_after.iter().zip(&decayed).enumerate()
                    {
                        let expect = if i == basis { dec + 1.0 } else { dec };
                        assert_relative_eq!(after, expect, epsilon = 1e-10);
                    }
                }
                EventKind::Erasure => {
                    assert!(ev.amplitudes_after.iter().all(|&a| a == 0.0));
                }
            }
            prev_t = ev.time;
            prev_amps = ev.amplitudes_after.clone();
        }
        assert!(r.events.iter().map(|e| e.time).is_sorted());
    }

    #[test]
    fn symmetric_two_basis_race_is_fair() {
        let mut c = base_config();
        c.dominance_threshold = 5.0;
        c.horizon = 50.0;
        let n = 10_000usize;
        let records = run_competition_ensemble(&c, n).unwrap();
        let stats = symmetry_breaking_stats(&records).unwrap();
        assert_eq!(stats.none_count, 0);
        let wins0 = stats.winner_counts[0] as f64;
        let sigma = (n as f64 * 0.25).sqrt();
        assert!(
            (wins0 - n as f64 / 2.0).abs() < 3.0 * sigma,
            "basis 0 won {wins0} of {n}"
        );
    }

    #[test]
    fn stationary_mean_matches_shot_noise_closed_form() {
        // δ = 1, λ = 1, F = 10, single basis: long-run time average within
        // 5% of δF/λ = 10.
        let mut c = base_config();
        c.n_bases = 1;
        c.horizon = 10_000.0;
        let r = run_competition(&c).unwrap();
        assert_relative_eq!(r.stationary_means[0], 10.0, max_relative = 0.05);
    }

    #[test]
    fn equilibrium_amplitude_closed_forms() {
        // periodic: 1/(e^{0.1} − 1) = 9.50833…
        let periodic =
            equilibrium_amplitude(1.0, 1.0, 10.0, EquilibriumSchedule::PeriodicFixedPoint)
                .unwrap();
        assert_relative_eq!(periodic, 9.508331944775414, epsilon = 1e-12);
        // poisson mean: δF/λ = 10
        let poisson =
            equilibrium_amplitude(1.0, 1.0, 10.0, EquilibriumSchedule::PoissonMean).unwrap();
        assert_relative_eq!(poisson, 10.0, epsilon = 1e-12);
        // F → 0⁺: both vanish
        for schedule in [
            EquilibriumSchedule::PoissonMean,
            EquilibriumSchedule::PeriodicFixedPoint,
        ] {
            let v = equilibrium_amplitude(1.0, 1.0, 1e-6, schedule).unwrap();
            assert!(v < 1e-5);
        }
        // λ = 0 → unbounded flag
        assert!(matches!(
            equilibrium_amplitude(1.0, 0.0, 10.0, EquilibriumSchedule::PoissonMean),
            Err(CompetitionError::UnboundedEquilibrium)
        ));
    }

    #[test]
    fn equilibrium_is_homogeneous_in_delta() {
        for schedule in [
            EquilibriumSchedule::PoissonMean,
            EquilibriumSchedule::PeriodicFixedPoint,
        ] {
            let base = equilibrium_amplitude(1.0, 0.7, 13.0, schedule).unwrap();
            let scaled = equilibrium_amplitude(3.5, 0.7, 13.0, schedule).unwrap();
            assert_relative_eq!(scaled, 3.5 * base, epsilon = 1e-12);
        }
    }

    #[test]
    fn proportional_selection_is_monotone_in_amplitude() {
        let rule = SelectionRule::ProportionalWithFloor { eta: 0.1 };
        let p1 = selection_probabilities(&[0.0, 0.0, 0.0], &rule, 1.0);
        assert_relative_eq!(p1[0], 1.0 / 3.0, epsilon = 1e-12);
        let p2 = selection_probabilities(&[2.0, 0.0, 0.0], &rule, 1.0);
        assert!(p2[0] > p1[0]);
        let p3 = selection_probabilities(&[5.0, 0.0, 0.0], &rule, 1.0);
        assert!(p3[0] > p2[0]);
        // Probabilities always sum to one.
        for probs in [&p1, &p2, &p3] {
            let total: f64 = probs.iter().sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn exchange_symmetry_under_label_permutation() {
        // Biased start: histogram under a permuted initial condition matches
        // the permuted histogram, statistically.
        let n = 4000usize;
        let mut c = base_config();
        c.n_bases = 3;
        c.dominance_threshold = 4.0;
        c.horizon = 30.0;
        c.initial_amplitudes = Some(vec![1.0, 0.0, 0.0]);
        let wins_a = symmetry_breaking_stats(&run_competition_ensemble(&c, n).unwrap())
            .unwrap()
            .winner_counts;

        let mut c2 = c.clone();
        c2.initial_amplitudes = Some(vec![0.0, 0.0, 1.0]);
        c2.seed = 99;
        let wins_b = symmetry_breaking_stats(&run_competition_ensemble(&c2, n).unwrap())
            .unwrap()
            .winner_counts;

        // Basis 0 of run A should behave like basis 2 of run B.
        let (pa, pb) = (wins_a[0] as f64 / n as f64, wins_b[2] as f64 / n as f64);
        let sigma = (2.0 * 0.25 / n as f64).sqrt();
        assert!((pa - pb).abs() < 4.0 * sigma, "pa {pa} pb {pb}");
    }

    #[test]
    fn biased_start_wins_more_often_than_uniform() {
        let n = 2000usize;
        let mut c = base_config();
        c.n_bases = 4;
        c.dominance_threshold = 6.0;
        c.horizon = 40.0;
        c.initial_amplitudes = Some(vec![3.0, 0.0, 0.0, 0.0]);
        c.seed = 17;
        let stats = symmetry_breaking_stats(&run_competition_ensemble(&c, n).unwrap()).unwrap();
        let p_win = stats.winner_counts[0] as f64 / n as f64;
        // One-sided binomial: under the null p = 1/4, 3σ ≈ 0.029.
        assert!(p_win > 0.25 + 3.0 * (0.25 * 0.75 / n as f64).sqrt(), "p = {p_win}");
    }

    #[test]
    fn temperature_erasure_suppresses_dominance() {
        let mut c = base_config();
        c.dominance_threshold = 6.0;
        c.horizon = 8.0;
        c.seed = 23;
        let sweep = temperature_sweep(&c, &[0.0, 1.0, 2.0, 4.0, 8.0], 300).unwrap();
        let p0 = sweep.points[0].dominance_probability;
        let p_last = sweep.points.last().unwrap().dominance_probability;
        assert!(p0 > 0.9, "p(T=0) = {p0}");
        assert!(p_last < p0, "no suppression: {p0} vs {p_last}");
        assert!(sweep.transition_estimate.is_some());
    }

    #[test]
    fn zero_temperature_with_reachable_threshold_always_dominates() {
        // θ < δF/λ and a generous horizon → dominance probability 1.
        let mut c = base_config();
        c.dominance_threshold = 5.0; // δF/λ = 10
        c.horizon = 60.0;
        c.seed = 31;
        let records = run_competition_ensemble(&c, 400).unwrap();
        assert!(records.iter().all(|r| r.winner.is_some()));
    }

    #[test]
    fn scaling_curve_is_linear_when_decay_is_slow() {
        let mut c = base_config();
        c.rate_constant_c = 25.0;
        c.horizon = 30.0;
        c.seed = 7;
        let curve = n_scaling_curve(&c, &[4, 8, 16], 12).unwrap();
        let fit = curve.fit.unwrap();
        // slope ≈ c·δ/λ = 25
        assert!((fit.slope - 25.0).abs() / 25.0 < 0.05, "slope {}", fit.slope);
        assert!(fit.r_squared > 0.99);
    }

    #[test]
    fn single_n_scaling_fit_is_flagged_degenerate() {
        let c = base_config();
        let curve = n_scaling_curve(&c, &[8], 4).unwrap();
        assert!(curve.fit.is_none());
    }

    #[test]
    fn determinism_per_seed() {
        let c = base_config();
        let a = run_competition(&c).unwrap();
        let b = run_competition(&c).unwrap();
        assert_eq!(a.n_actualizations, b.n_actualizations);
        assert_eq!(a.final_amplitudes, b.final_amplitudes);
        assert_eq!(a.events.len(), b.events.len());
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        let mut c = base_config();
        c.delta = -1.0;
        assert!(matches!(
            c.validate(),
            Err(CompetitionError::BadIncrement(_))
        ));
        let mut c = base_config();
        c.n_bases = 0;
        assert!(matches!(c.validate(), Err(CompetitionError::NoBases)));
        let mut c = base_config();
        c.selection = SelectionRule::ProportionalWithFloor { eta: 0.0 };
        assert!(matches!(c.validate(), Err(CompetitionError::BadFloor(_))));
    }
}
