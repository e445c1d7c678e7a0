//! Trajectory engine: unitary evolution interleaved with stochastic per-site
//! measurement and phenomenological dephasing.
//!
//! Pure-state unraveling is the primary mode; a density-matrix mode switches
//! on automatically when a decoherence channel is configured (dephasing
//! cannot be represented on a single state vector).

mod measures;

pub use measures::{
    evolution_measures, qze_decoherence_ratio, qze_decoherence_ratio_of_record,
    EvolutionMeasures,
};

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonians::{propagator, HamiltonianError, SpinChainHamiltonian};
use crate::measurement::{MeasurementBasis, MeasurementError, SiteMeasurementConfig};
use crate::quantum::{conjugate, DensityMatrix, QuantumError, StateVector, SubsystemLayout};
use crate::random::{derive_seed, rng_from_seed};
use crate::scalar::Real;

#[derive(Debug, Clone, Error)]
pub enum DynamicsError {
    #[error("step duration must be positive and finite, got {0}")]
    BadStepDuration(f64),
    #[error("need at least one step")]
    NoSteps,
    #[error("decoherence rate must be nonnegative, got {0}")]
    BadRate(f64),
    #[error("power-law scale must be positive, got {0}")]
    BadScale(f64),
    #[error("power-law exponent must be positive, got {0}")]
    BadExponent(f64),
    #[error("elapsed time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("number of measurements k must be at least 1")]
    ZeroMeasurements,
    #[error("entropy series of length {len} too short for window {window}")]
    SeriesTooShort { len: usize, window: usize },
    #[error("need at least two states")]
    TooFewStates,
    #[error("times must be strictly increasing")]
    NonMonotoneTimes,
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// Shape of the dephasing envelope applied to off-diagonal elements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecoherenceKind<T> {
    None,
    /// `D(t) = e^{−Γt}`
    Exponential { gamma: T },
    /// `D(t) = (1 + t/τ)^{−α}`
    PowerLaw { tau: T, alpha: T },
}

impl<T: Real> DecoherenceKind<T> {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        match *self {
            DecoherenceKind::None => Ok(()),
            DecoherenceKind::Exponential { gamma } => {
                if gamma < T::zero() || !gamma.is_finite() {
                    Err(DynamicsError::BadRate(gamma.as_f64()))
                } else {
                    Ok(())
                }
            }
            DecoherenceKind::PowerLaw { tau, alpha } => {
                if !(tau > T::zero()) {
                    Err(DynamicsError::BadScale(tau.as_f64()))
                } else if !(alpha > T::zero()) {
                    Err(DynamicsError::BadExponent(alpha.as_f64()))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, DecoherenceKind::None)
    }
}

/// Product basis whose off-diagonals the environment suppresses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DephasingBasis {
    #[default]
    PauliZProduct,
    PauliXProduct,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DecoherenceSpec<T> {
    pub kind: DecoherenceKind<T>,
    #[serde(default)]
    pub basis: DephasingBasis,
}

impl<T: Real> DecoherenceSpec<T> {
    pub fn none() -> Self {
        Self {
            kind: DecoherenceKind::None,
            basis: DephasingBasis::PauliZProduct,
        }
    }
}

/// Dephasing envelope `D(t)`; multiplicative in `t` for the exponential kind
/// only.
pub fn decay_factor<T: Real>(kind: &DecoherenceKind<T>, t: T) -> T {
    match *kind {
        DecoherenceKind::None => T::one(),
        DecoherenceKind::Exponential { gamma } => (-gamma * t).exp(),
        DecoherenceKind::PowerLaw { tau, alpha } => (T::one() + t / tau).powf(-alpha),
    }
}

/// Multiply all off-diagonal elements (in the spec's pointer basis) by
/// `D(t_elapsed)`, leaving the diagonal untouched. Dephasing is completely
/// positive and trace preserving, so the result needs no re-validation.
pub fn apply_decoherence<T: Real>(
    rho: &DensityMatrix<T>,
    spec: &DecoherenceSpec<T>,
    t_elapsed: T,
) -> Result<DensityMatrix<T>, DynamicsError> {
    spec.kind.validate()?;
    if t_elapsed < T::zero() {
        return Err(DynamicsError::NegativeTime(t_elapsed.as_f64()));
    }
    let factor = decay_factor(&spec.kind, t_elapsed);
    Ok(apply_dephasing_factor(rho, spec.basis, factor))
}

/// Scale off-diagonals by an explicit factor in the given product basis.
pub(crate) fn apply_dephasing_factor<T: Real>(
    rho: &DensityMatrix<T>,
    basis: DephasingBasis,
    factor: T,
) -> DensityMatrix<T> {
    let rotated = match basis {
        DephasingBasis::PauliZProduct => rho.clone(),
        DephasingBasis::PauliXProduct => {
            let h = hadamard_all(rho.layout());
            conjugate(rho, &h)
        }
    };
    let mut m = rotated.matrix().clone();
    let f = Complex::new(factor, T::zero());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                m[(i, j)] *= f;
            }
        }
    }
    let dephased = DensityMatrix::from_valid_parts(rho.layout().clone(), m);
    match basis {
        DephasingBasis::PauliZProduct => dephased,
        DephasingBasis::PauliXProduct => {
            let h = hadamard_all(rho.layout());
            conjugate(&dephased, &h)
        }
    }
}

/// `H^{⊗n}` on an all-qubit layout.
fn hadamard_all<T: Real>(layout: &SubsystemLayout) -> DMatrix<Complex<T>> {
    let s = T::of(std::f64::consts::FRAC_1_SQRT_2);
    let h2 = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex::new(s, T::zero()),
            Complex::new(s, T::zero()),
            Complex::new(s, T::zero()),
            Complex::new(-s, T::zero()),
        ],
    );
    let mut out = DMatrix::from_element(1, 1, Complex::new(T::one(), T::zero()));
    for _ in 0..layout.n_sites() {
        out = out.kronecker(&h2);
    }
    out
}

/// Unitary von Neumann step `ρ → U ρ U†` with `U = exp(−iH dt)`; trace and
/// spectrum are preserved.
pub fn evolve_von_neumann<T: Real>(
    rho: &DensityMatrix<T>,
    h: &SpinChainHamiltonian<T>,
    dt: T,
) -> Result<DensityMatrix<T>, DynamicsError> {
    let u = propagator(h, dt)?;
    Ok(conjugate(rho, &u))
}

/// How measurements are dealt each step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementMode {
    /// Every site is independently measured with the effective per-site
    /// probability, simultaneously (commuting projectors).
    #[default]
    SimultaneousKraus,
    /// With probability `min(1, c·N)` one uniformly chosen site is measured.
    SequentialSingleSite,
}

/// Initial state selector, resolvable against the chain layout.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState<T: Real> {
    BasisState { index: usize },
    QubitBits { bits: Vec<u8> },
    /// `|0101…⟩`
    Neel,
    /// `|+⟩^{⊗n}`
    PlusProduct,
    Custom { state: StateVector<T> },
}

impl<T: Real> InitialState<T> {
    pub fn resolve(&self, layout: &SubsystemLayout) -> Result<StateVector<T>, DynamicsError> {
        match self {
            InitialState::BasisState { index } => {
                Ok(StateVector::basis_state(layout.clone(), *index)?)
            }
            InitialState::QubitBits { bits } => {
                if bits.len() != layout.n_sites() {
                    return Err(DynamicsError::Quantum(QuantumError::LengthMismatch {
                        expected: layout.n_sites(),
                        got: bits.len(),
                    }));
                }
                Ok(StateVector::qubit_bits(bits)?)
            }
            InitialState::Neel => {
                let bits: Vec<u8> = (0..layout.n_sites()).map(|i| (i % 2) as u8).collect();
                Ok(StateVector::qubit_bits(&bits)?)
            }
            InitialState::PlusProduct => Ok(StateVector::plus_product(layout.n_sites())?),
            InitialState::Custom { state } => {
                if state.layout() != layout {
                    return Err(DynamicsError::Quantum(QuantumError::LayoutMismatch));
                }
                Ok(state.clone())
            }
        }
    }
}

/// Full description of one stochastic trajectory run.
#[derive(Clone, Debug)]
pub struct TrajectoryConfig<T: Real> {
    pub hamiltonian: SpinChainHamiltonian<T>,
    pub dt: T,
    pub steps: usize,
    pub site_measure: SiteMeasurementConfig<T>,
    pub decoherence: DecoherenceSpec<T>,
    pub mode: MeasurementMode,
    pub initial_state: InitialState<T>,
    pub seed: u64,
}

impl<T: Real> TrajectoryConfig<T> {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(DynamicsError::BadStepDuration(self.dt.as_f64()));
        }
        if self.steps == 0 {
            return Err(DynamicsError::NoSteps);
        }
        self.site_measure.validate()?;
        self.decoherence.kind.validate()?;
        Ok(())
    }

    pub fn layout(&self) -> SubsystemLayout {
        SubsystemLayout::qubits(self.hamiltonian.n_sites()).expect("chain has ≥ 2 sites")
    }
}

/// One site measurement: which site, which outcome, at which step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementEvent {
    pub step: usize,
    pub site: usize,
    pub outcome: u8,
}

/// Time series produced by [`run_trajectory`].
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryRecord<T> {
    pub times: Vec<T>,
    /// `|⟨ψ₀|ψ_t⟩|²` (or `⟨ψ₀|ρ_t|ψ₀⟩` in density-matrix mode).
    pub survival: Vec<T>,
    /// Entanglement entropy of the first `⌊L/2⌋` sites, in nats.
    pub half_chain_entropy: Vec<T>,
    /// `tr ρ²`, recorded in density-matrix mode only.
    pub purity: Option<Vec<T>>,
    pub outcomes: Vec<MeasurementEvent>,
    pub seed: u64,
}

enum EngineState<T: Real> {
    Pure(StateVector<T>),
    Mixed(DensityMatrix<T>),
}

impl<T: Real> EngineState<T> {
    fn survival(&self, psi0: &StateVector<T>) -> T {
        match self {
            EngineState::Pure(psi) => psi0.overlap(psi).expect("layouts match"),
            EngineState::Mixed(rho) => rho.expectation(psi0).expect("layouts match"),
        }
    }

    fn half_chain_entropy(&self) -> T {
        match self {
            EngineState::Pure(psi) => psi.half_chain_entropy(),
            EngineState::Mixed(rho) => {
                let half = (rho.layout().n_sites() / 2).max(1);
                let keep: Vec<usize> = (0..half).collect();
                rho.partial_trace(&keep)
                    .expect("half-chain subset is valid")
                    .von_neumann_entropy()
            }
        }
    }

    fn purity(&self) -> T {
        match self {
            EngineState::Pure(_) => T::one(),
            EngineState::Mixed(rho) => rho.purity(),
        }
    }
}

/// One engine step on a pure state: apply `U`, then the sampled measurement
/// for the given mode. Returns the measured (site, outcome) pairs.
pub fn step<T: Real, R: Rng + ?Sized>(
    psi: &StateVector<T>,
    u: &DMatrix<Complex<T>>,
    site_measure: &SiteMeasurementConfig<T>,
    mode: MeasurementMode,
    rng: &mut R,
) -> Result<(StateVector<T>, Vec<(usize, u8)>), DynamicsError> {
    if u.ncols() != psi.dim() {
        return Err(DynamicsError::Quantum(QuantumError::LengthMismatch {
            expected: psi.dim(),
            got: u.ncols(),
        }));
    }
    let mut state = EngineState::Pure(StateVector::from_valid_parts(
        psi.layout().clone(),
        u * psi.amplitudes(),
    ));
    if let EngineState::Pure(p) = &mut state {
        p.renormalize()?;
    }
    let outcomes = measure_sites(&mut state, site_measure, mode, rng)?;
    match state {
        EngineState::Pure(p) => Ok((p, outcomes)),
        EngineState::Mixed(_) => unreachable!("pure input stays pure"),
    }
}

fn measure_sites<T: Real, R: Rng + ?Sized>(
    state: &mut EngineState<T>,
    config: &SiteMeasurementConfig<T>,
    mode: MeasurementMode,
    rng: &mut R,
) -> Result<Vec<(usize, u8)>, DynamicsError> {
    let layout = match state {
        EngineState::Pure(p) => p.layout().clone(),
        EngineState::Mixed(m) => m.layout().clone(),
    };
    for (site, &dim) in layout.dims().iter().enumerate() {
        if dim != 2 {
            return Err(DynamicsError::Measurement(MeasurementError::NonQubitSite {
                site,
                dim,
            }));
        }
    }
    let n = layout.n_sites();
    let p_eff = config.effective_p(n);
    let mut measured = Vec::new();
    match mode {
        MeasurementMode::SimultaneousKraus => {
            for site in 0..n {
                if T::of(rng.gen::<f64>()) < p_eff {
                    let outcome = measure_one_site(state, &layout, site, config.basis, rng)?;
                    measured.push((site, outcome));
                }
            }
        }
        MeasurementMode::SequentialSingleSite => {
            if T::of(rng.gen::<f64>()) < p_eff {
                let site = rng.gen_range(0..n);
                let outcome = measure_one_site(state, &layout, site, config.basis, rng)?;
                measured.push((site, outcome));
            }
        }
    }
    Ok(measured)
}

fn measure_one_site<T: Real, R: Rng + ?Sized>(
    state: &mut EngineState<T>,
    layout: &SubsystemLayout,
    site: usize,
    basis: MeasurementBasis,
    rng: &mut R,
) -> Result<u8, DynamicsError> {
    let stride = layout.strides()[site];
    match state {
        EngineState::Pure(psi) => {
            if basis == MeasurementBasis::PauliX {
                hadamard_site_pure(psi, stride);
            }
            let amps = psi.amplitudes();
            let mut p0 = T::zero();
            for (i, z) in amps.iter().enumerate() {
                if (i / stride) % 2 == 0 {
                    p0 += z.norm_sqr();
                }
            }
            let outcome: u8 = if T::of(rng.gen::<f64>()) < p0 { 0 } else { 1 };
            let amps = psi.amplitudes_mut();
            for i in 0..amps.len() {
                if ((i / stride) % 2) as u8 != outcome {
                    amps[i] = Complex::new(T::zero(), T::zero());
                }
            }
            psi.renormalize()?;
            if basis == MeasurementBasis::PauliX {
                hadamard_site_pure(psi, stride);
            }
            Ok(outcome)
        }
        EngineState::Mixed(rho) => {
            if basis == MeasurementBasis::PauliX {
                hadamard_site_mixed(rho, stride);
            }
            let m = rho.matrix();
            let mut p0 = T::zero();
            for i in 0..m.nrows() {
                if (i / stride) % 2 == 0 {
                    p0 += m[(i, i)].re;
                }
            }
            let outcome: u8 = if T::of(rng.gen::<f64>()) < p0 { 0 } else { 1 };
            let prob = if outcome == 0 { p0 } else { T::one() - p0 };
            let prob = prob.max(T::of(1e-300));
            let m = rho.matrix_mut();
            let scale = Complex::new(T::one() / prob, T::zero());
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let keep = ((i / stride) % 2) as u8 == outcome
                        && ((j / stride) % 2) as u8 == outcome;
                    if keep {
                        m[(i, j)] *= scale;
                    } else {
                        m[(i, j)] = Complex::new(T::zero(), T::zero());
                    }
                }
            }
            if basis == MeasurementBasis::PauliX {
                hadamard_site_mixed(rho, stride);
            }
            Ok(outcome)
        }
    }
}

fn hadamard_site_pure<T: Real>(psi: &mut StateVector<T>, stride: usize) {
    let s = Complex::new(T::of(std::f64::consts::FRAC_1_SQRT_2), T::zero());
    let amps = psi.amplitudes_mut();
    let n = amps.len();
    for i in 0..n {
        if (i / stride) % 2 == 0 {
            let j = i + stride;
            let a = amps[i];
            let b = amps[j];
            amps[i] = (a + b) * s;
            amps[j] = (a - b) * s;
        }
    }
}

fn hadamard_site_mixed<T: Real>(rho: &mut DensityMatrix<T>, stride: usize) {
    let s = Complex::new(T::of(std::f64::consts::FRAC_1_SQRT_2), T::zero());
    let m = rho.matrix_mut();
    let n = m.nrows();
    // Row transform, then column transform.
    for col in 0..n {
        for i in 0..n {
            if (i / stride) % 2 == 0 {
                let j = i + stride;
                let a = m[(i, col)];
                let b = m[(j, col)];
                m[(i, col)] = (a + b) * s;
                m[(j, col)] = (a - b) * s;
            }
        }
    }
    for row in 0..n {
        for i in 0..n {
            if (i / stride) % 2 == 0 {
                let j = i + stride;
                let a = m[(row, i)];
                let b = m[(row, j)];
                m[(row, i)] = (a + b) * s;
                m[(row, j)] = (a - b) * s;
            }
        }
    }
}

/// Run one stochastic trajectory. Deterministic for a fixed config and seed;
/// the rng stream is consumed in a fixed order (site inclusion draws, then
/// outcome draws, sites ascending).
pub fn run_trajectory<T: Real>(config: &TrajectoryConfig<T>) -> Result<TrajectoryRecord<T>, DynamicsError> {
    config.validate()?;
    let layout = config.layout();
    let psi0 = config.initial_state.resolve(&layout)?;
    let u = propagator(&config.hamiltonian, config.dt)?;
    let mut rng = rng_from_seed(config.seed);

    let mixed_mode = !config.decoherence.kind.is_none();
    let mut state = if mixed_mode {
        EngineState::Mixed(psi0.to_density())
    } else {
        EngineState::Pure(psi0.clone())
    };

    let n_points = config.steps + 1;
    let mut times = Vec::with_capacity(n_points);
    let mut survival = Vec::with_capacity(n_points);
    let mut entropy = Vec::with_capacity(n_points);
    let mut purity = if mixed_mode {
        Some(Vec::with_capacity(n_points))
    } else {
        None
    };
    let mut outcomes = Vec::new();

    times.push(T::zero());
    survival.push(state.survival(&psi0));
    entropy.push(state.half_chain_entropy());
    if let Some(p) = purity.as_mut() {
        p.push(state.purity());
    }

    for step_idx in 1..=config.steps {
        // Unitary stretch.
        match &mut state {
            EngineState::Pure(psi) => {
                let evolved = &u * psi.amplitudes();
                *psi = StateVector::from_valid_parts(layout.clone(), evolved);
                psi.renormalize()?;
            }
            EngineState::Mixed(rho) => {
                *rho = conjugate(rho, &u);
            }
        }
        // Stochastic measurement.
        for (site, outcome) in measure_sites(&mut state, &config.site_measure, config.mode, &mut rng)? {
            outcomes.push(MeasurementEvent {
                step: step_idx,
                site,
                outcome,
            });
        }
        // Dephasing: exact cumulative envelope applied as a stepwise ratio.
        if mixed_mode {
            let t_prev = config.dt * T::of((step_idx - 1) as f64);
            let t_now = config.dt * T::of(step_idx as f64);
            let ratio = decay_factor(&config.decoherence.kind, t_now)
                / decay_factor(&config.decoherence.kind, t_prev);
            if let EngineState::Mixed(rho) = &mut state {
                *rho = apply_dephasing_factor(rho, config.decoherence.basis, ratio);
            }
        }

        times.push(config.dt * T::of(step_idx as f64));
        survival.push(state.survival(&psi0));
        entropy.push(state.half_chain_entropy());
        if let Some(p) = purity.as_mut() {
            p.push(state.purity());
        }
    }

    Ok(TrajectoryRecord {
        times,
        survival,
        half_chain_entropy: entropy,
        purity,
        outcomes,
        seed: config.seed,
    })
}

/// Run `n` independent trajectories with per-index derived seeds; safe to
/// parallelize because every trajectory owns its own rng stream, and the
/// output order is by index regardless of scheduling.
pub fn run_ensemble<T: Real + Send + Sync>(
    config: &TrajectoryConfig<T>,
    n: usize,
) -> Result<Vec<TrajectoryRecord<T>>, DynamicsError> {
    (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let mut c = config.clone();
            c.seed = derive_seed(config.seed, k);
            run_trajectory(&c)
        })
        .collect()
}

/// Survival probability after `k` equally spaced projective measurements of
/// the initial state over total time `t_total`: per-interval survival to the
/// `k`-th power (the state resets to `ψ₀` on every success).
pub fn zeno_survival<T: Real>(
    h: &SpinChainHamiltonian<T>,
    psi0: &StateVector<T>,
    t_total: T,
    k: usize,
) -> Result<T, DynamicsError> {
    if k == 0 {
        return Err(DynamicsError::ZeroMeasurements);
    }
    let u = propagator(h, t_total / T::of(k as f64))?;
    let evolved = StateVector::from_valid_parts(psi0.layout().clone(), &u * psi0.amplitudes());
    let p_interval = psi0.overlap(&evolved)?;
    Ok(p_interval.powi(k as i32))
}

/// Cumulative survival after each of the `k` measurements (k+1 points,
/// starting at 1 at t = 0).
pub fn zeno_survival_curve<T: Real>(
    h: &SpinChainHamiltonian<T>,
    psi0: &StateVector<T>,
    t_total: T,
    k: usize,
) -> Result<Vec<(T, T)>, DynamicsError> {
    if k == 0 {
        return Err(DynamicsError::ZeroMeasurements);
    }
    let u = propagator(h, t_total / T::of(k as f64))?;
    let evolved = StateVector::from_valid_parts(psi0.layout().clone(), &u * psi0.amplitudes());
    let p_interval = psi0.overlap(&evolved)?;
    let dt = t_total / T::of(k as f64);
    Ok((0..=k)
        .map(|j| (dt * T::of(j as f64), p_interval.powi(j as i32)))
        .collect())
}

/// Ensemble point of a measurement-rate sweep.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FreezingPoint<T> {
    pub p_site: T,
    pub mean_survival: T,
    pub sem_survival: T,
    pub mean_entropy: T,
    pub sem_entropy: T,
}

/// For each measurement probability, run an ensemble and average late-time
/// (second half of the run) survival and half-chain entropy. Output sorted
/// by `p`.
pub fn zeno_freezing_sweep<T: Real + Send + Sync>(
    template: &TrajectoryConfig<T>,
    p_values: &[T],
    n_trajectories: usize,
) -> Result<Vec<FreezingPoint<T>>, DynamicsError> {
    let mut ps: Vec<T> = p_values.to_vec();
    ps.sort_by(|a, b| a.partial_cmp(b).expect("finite probabilities"));
    let mut points = Vec::with_capacity(ps.len());
    for (p_idx, &p) in ps.iter().enumerate() {
        let mut config = template.clone();
        config.site_measure.p_site = p;
        config.seed = derive_seed(template.seed, p_idx as u64);
        let records = run_ensemble(&config, n_trajectories)?;
        let late = |series: &[T]| -> T {
            let start = series.len() / 2;
            crate::stats::mean(&series[start..])
        };
        let survivals: Vec<T> = records.iter().map(|r| late(&r.survival)).collect();
        let entropies: Vec<T> = records
            .iter()
            .map(|r| late(&r.half_chain_entropy))
            .collect();
        points.push(FreezingPoint {
            p_site: p,
            mean_survival: crate::stats::mean(&survivals),
            sem_survival: crate::stats::sem(&survivals),
            mean_entropy: crate::stats::mean(&entropies),
            sem_entropy: crate::stats::sem(&entropies),
        });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{build_ising, sigma_x, IsingVariant, SpinChainHamiltonian};
    use crate::measurement::CouplingRule;
    use approx::assert_relative_eq;

    fn rabi_hamiltonian(omega: f64) -> SpinChainHamiltonian<f64> {
        let m = sigma_x::<f64>() * Complex::new(omega / 2.0, 0.0);
        SpinChainHamiltonian::custom(m, 1).unwrap()
    }

    fn no_measure() -> SiteMeasurementConfig<f64> {
        SiteMeasurementConfig::fixed(0.0).unwrap()
    }

    fn config(h: SpinChainHamiltonian<f64>, dt: f64, steps: usize) -> TrajectoryConfig<f64> {
        TrajectoryConfig {
            hamiltonian: h,
            dt,
            steps,
            site_measure: no_measure(),
            decoherence: DecoherenceSpec::none(),
            mode: MeasurementMode::SimultaneousKraus,
            initial_state: InitialState::BasisState { index: 0 },
            seed: 0,
        }
    }

    #[test]
    fn zero_steps_rejected_one_step_gives_two_points() {
        let mut c = config(rabi_hamiltonian(1.0), 0.1, 1);
        let r = run_trajectory(&c).unwrap();
        assert_eq!(r.times.len(), 2);
        c.steps = 0;
        assert!(matches!(run_trajectory(&c), Err(DynamicsError::NoSteps)));
    }

    #[test]
    fn rabi_survival_matches_cosine_squared() {
        // H = (Ω/2)σ^x, no measurement: survival(t) = cos²(t/2)
        let c = config(rabi_hamiltonian(1.0), 0.1, 40);
        let r = run_trajectory(&c).unwrap();
        for (t, s) in r.times.iter().zip(&r.survival) {
            let expect = (t / 2.0).cos().powi(2);
            assert_relative_eq!(*s, expect, epsilon = 1e-8);
        }
    }

    #[test]
    fn trajectories_are_bit_reproducible() {
        let h = build_ising::<f64>(4, 1.0, IsingVariant::Xyz).unwrap();
        let mut c = config(h, 0.2, 25);
        c.site_measure = SiteMeasurementConfig::fixed(0.3).unwrap();
        c.initial_state = InitialState::Neel;
        c.seed = 123;
        let a = run_trajectory(&c).unwrap();
        let b = run_trajectory(&c).unwrap();
        assert_eq!(a.survival, b.survival);
        assert_eq!(a.half_chain_entropy, b.half_chain_entropy);
        assert_eq!(a.outcomes, b.outcomes);
    }

    #[test]
    fn zeno_fixed_point_under_full_measurement() {
        // H = 0, p = 1, z-basis initial basis state: frozen forever.
        let h = SpinChainHamiltonian::custom(
            DMatrix::<Complex<f64>>::zeros(4, 4),
            2,
        )
        .unwrap();
        let mut c = config(h, 0.5, 20);
        c.site_measure = SiteMeasurementConfig::fixed(1.0).unwrap();
        c.initial_state = InitialState::QubitBits { bits: vec![0, 1] };
        let r = run_trajectory(&c).unwrap();
        for s in &r.survival {
            assert_relative_eq!(*s, 1.0, epsilon = 1e-12);
        }
        // Every step measured both sites with consistent outcomes.
        assert_eq!(r.outcomes.len(), 40);
        for ev in &r.outcomes {
            assert_eq!(ev.outcome, if ev.site == 0 { 0 } else { 1 });
        }
    }

    #[test]
    fn plus_state_collapses_half_half_under_z_measurement() {
        // One step with H = 0, p = 1 on |+⟩ → |0⟩ or |1⟩, empirically 50/50.
        let h = SpinChainHamiltonian::custom(DMatrix::<Complex<f64>>::zeros(2, 2), 1).unwrap();
        let mut zeros = 0usize;
        let n = 10_000usize;
        for seed in 0..n as u64 {
            let mut c = config(h.clone(), 0.1, 1);
            c.site_measure = SiteMeasurementConfig::fixed(1.0).unwrap();
            c.initial_state = InitialState::PlusProduct;
            c.seed = seed;
            let r = run_trajectory(&c).unwrap();
            if r.outcomes[0].outcome == 0 {
                zeros += 1;
            }
        }
        let freq = zeros as f64 / n as f64;
        let sigma = (0.25f64 / n as f64).sqrt();
        assert!((freq - 0.5).abs() < 3.0 * sigma, "freq {freq}");
    }

    #[test]
    fn sequential_mode_measures_at_most_one_site() {
        let h = build_ising::<f64>(4, 1.0, IsingVariant::Xyz).unwrap();
        let mut c = config(h, 0.2, 50);
        c.mode = MeasurementMode::SequentialSingleSite;
        c.site_measure = SiteMeasurementConfig {
            p_site: 0.0,
            basis: MeasurementBasis::PauliZ,
            coupling_rule: CouplingRule::ProportionalToN { c: 0.2 },
        };
        c.initial_state = InitialState::Neel;
        c.seed = 7;
        let r = run_trajectory(&c).unwrap();
        for step_idx in 1..=50usize {
            let count = r.outcomes.iter().filter(|e| e.step == step_idx).count();
            assert!(count <= 1);
        }
        assert!(!r.outcomes.is_empty());
    }

    #[test]
    fn zeno_survival_matches_rabi_closed_form() {
        let h = rabi_hamiltonian(1.0);
        let psi0 = StateVector::qubit_bits(&[0]).unwrap();
        let t = std::f64::consts::PI;
        // k = 1: cos²(π/2) = 0
        let s1 = zeno_survival(&h, &psi0, t, 1).unwrap();
        assert!(s1.abs() < 1e-12);
        // k = 10: cos^20(π/20), evaluated independently
        let s10 = zeno_survival(&h, &psi0, t, 10).unwrap();
        let oracle = (std::f64::consts::PI / 20.0).cos().powi(20);
        assert_relative_eq!(oracle, 0.7805460697811408, epsilon = 1e-12);
        assert_relative_eq!(s10, oracle, epsilon = 1e-10);
    }

    #[test]
    fn zeno_quadratic_deficit_shrinks_by_four_when_k_quadruples() {
        let h = rabi_hamiltonian(1.0);
        let psi0 = StateVector::qubit_bits(&[0]).unwrap();
        let t = std::f64::consts::PI;
        let d64 = 1.0 - zeno_survival(&h, &psi0, t, 64).unwrap();
        let d256 = 1.0 - zeno_survival(&h, &psi0, t, 256).unwrap();
        let ratio = d64 / d256;
        assert!((ratio - 4.0).abs() < 0.1, "deficit ratio {ratio}");
    }

    #[test]
    fn zeno_survival_is_monotone_toward_unity() {
        let h = rabi_hamiltonian(1.0);
        let psi0 = StateVector::qubit_bits(&[0]).unwrap();
        let t = std::f64::consts::PI;
        let mut prev = 0.0;
        for k in [1usize, 2, 4, 8, 16, 32, 64, 128, 256] {
            let s = zeno_survival(&h, &psi0, t, k).unwrap();
            assert!(s >= prev - 1e-12, "not monotone at k={k}");
            prev = s;
        }
        assert!(prev > 0.99);
    }

    #[test]
    fn decoherence_factor_arithmetic() {
        // Γ = 0 → identity
        assert_relative_eq!(
            decay_factor(&DecoherenceKind::Exponential { gamma: 0.0f64 }, 5.0),
            1.0
        );
        // exponential at t = ln 2 halves off-diagonals
        assert_relative_eq!(
            decay_factor(&DecoherenceKind::Exponential { gamma: 1.0f64 }, 2.0f64.ln()),
            0.5,
            epsilon = 1e-12
        );
        // power law (1 + 3)^{-1} = 0.25
        assert_relative_eq!(
            decay_factor(
                &DecoherenceKind::PowerLaw {
                    tau: 1.0f64,
                    alpha: 1.0
                },
                3.0
            ),
            0.25,
            epsilon = 1e-12
        );
    }

    #[test]
    fn exponential_composes_power_law_does_not() {
        let exp_kind = DecoherenceKind::Exponential { gamma: 0.7f64 };
        let (t1, t2) = (0.4f64, 1.1f64);
        let composed = decay_factor(&exp_kind, t1) * decay_factor(&exp_kind, t2);
        assert_relative_eq!(composed, decay_factor(&exp_kind, t1 + t2), epsilon = 1e-12);

        let pl = DecoherenceKind::PowerLaw {
            tau: 1.0f64,
            alpha: 1.0,
        };
        let composed = decay_factor(&pl, t1) * decay_factor(&pl, t2);
        let direct = decay_factor(&pl, t1 + t2);
        assert!((composed - direct).abs() > 1e-3);
    }

    #[test]
    fn apply_decoherence_examples() {
        let plus = StateVector::<f64>::plus_product(1).unwrap();
        let rho = plus.to_density();
        // Γ = 1, t = ln 2: off-diagonals 0.5 · 0.5 = 0.25
        let spec = DecoherenceSpec {
            kind: DecoherenceKind::Exponential { gamma: 1.0 },
            basis: DephasingBasis::PauliZProduct,
        };
        let out = apply_decoherence(&rho, &spec, 2.0f64.ln()).unwrap();
        assert_relative_eq!(out.matrix()[(0, 1)].re, 0.25, epsilon = 1e-12);
        assert_relative_eq!(out.matrix()[(0, 0)].re, 0.5, epsilon = 1e-12);
        // Γ = 0 → identity map
        let spec0 = DecoherenceSpec {
            kind: DecoherenceKind::Exponential { gamma: 0.0 },
            basis: DephasingBasis::PauliZProduct,
        };
        let same = apply_decoherence(&rho, &spec0, 9.0).unwrap();
        assert_relative_eq!((same.matrix() - rho.matrix()).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn dephasing_in_x_basis_preserves_plus_state() {
        // |+⟩⟨+| is diagonal in the X product basis, so X-basis dephasing
        // leaves it fixed while Z-basis dephasing mixes it.
        let plus = StateVector::<f64>::plus_product(1).unwrap();
        let rho = plus.to_density();
        let spec_x = DecoherenceSpec {
            kind: DecoherenceKind::Exponential { gamma: 2.0 },
            basis: DephasingBasis::PauliXProduct,
        };
        let out = apply_decoherence(&rho, &spec_x, 3.0).unwrap();
        assert_relative_eq!((out.matrix() - rho.matrix()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn decohered_states_stay_positive() {
        let mut rng = crate::random::rng_from_seed(9);
        let rho = crate::random::random_density::<f64, _>(
            SubsystemLayout::qubits(2).unwrap(),
            &mut rng,
        );
        let spec = DecoherenceSpec {
            kind: DecoherenceKind::PowerLaw {
                tau: 0.5,
                alpha: 1.3,
            },
            basis: DephasingBasis::PauliXProduct,
        };
        let out = apply_decoherence(&rho, &spec, 2.0).unwrap();
        let min = out.eigenvalues_clamped()[0];
        assert!(min >= -1e-10);
        assert_relative_eq!(out.trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn von_neumann_evolution_preserves_purity_and_commuting_states() {
        let h = build_ising::<f64>(2, 0.9, IsingVariant::ZOnly).unwrap();
        // [H, ρ] = 0 for a z-basis diagonal state → unchanged.
        let rho = DensityMatrix::from_probabilities(
            SubsystemLayout::qubits(2).unwrap(),
            &[0.4, 0.3, 0.2, 0.1],
        )
        .unwrap();
        let out = evolve_von_neumann(&rho, &h, 0.37).unwrap();
        assert_relative_eq!((out.matrix() - rho.matrix()).norm(), 0.0, epsilon = 1e-10);

        // Purity is conserved over 100 steps for a generic state.
        let mut rng = crate::random::rng_from_seed(10);
        let mut rho =
            crate::random::random_density::<f64, _>(SubsystemLayout::qubits(2).unwrap(), &mut rng);
        let p0 = rho.purity();
        for _ in 0..100 {
            rho = evolve_von_neumann(&rho, &h, 0.05).unwrap();
        }
        assert_relative_eq!(rho.purity(), p0, epsilon = 1e-10);
    }

    #[test]
    fn bloch_rotation_moves_plus_to_minus() {
        // ρ = |+⟩⟨+|, H = (1/2)σ^z, dt = π → |−⟩⟨−|
        let h = SpinChainHamiltonian::custom(
            crate::hamiltonians::sigma_z::<f64>() * Complex::new(0.5, 0.0),
            1,
        )
        .unwrap();
        let plus = StateVector::<f64>::plus_product(1).unwrap();
        let rho = plus.to_density();
        let out = evolve_von_neumann(&rho, &h, std::f64::consts::PI).unwrap();
        assert_relative_eq!(out.matrix()[(0, 1)].re, -0.5, epsilon = 1e-10);
        assert_relative_eq!(out.matrix()[(0, 0)].re, 0.5, epsilon = 1e-10);
    }

    #[test]
    fn freezing_sweep_limits() {
        // p = 1 on a z-basis product state with z-basis measurement freezes;
        // p = 0 reproduces the unmeasured unitary value.
        let h = build_ising::<f64>(3, 1.0, IsingVariant::Xyz).unwrap();
        let mut template = config(h.clone(), 0.01, 20);
        template.initial_state = InitialState::Neel;
        template.seed = 42;
        let points = zeno_freezing_sweep(&template, &[0.0, 1.0], 8).unwrap();
        assert_eq!(points.len(), 2);
        assert!(points[0].p_site == 0.0 && points[1].p_site == 1.0);
        assert!(points[1].mean_survival > 0.95, "frozen limit");
        // p = 0: all trajectories identical to the deterministic unitary run.
        let mut c = template.clone();
        c.site_measure = SiteMeasurementConfig::fixed(0.0).unwrap();
        let r = run_trajectory(&c).unwrap();
        let late: Vec<f64> = r.survival[r.survival.len() / 2..].to_vec();
        assert_relative_eq!(
            points[0].mean_survival,
            crate::stats::mean(&late),
            epsilon = 1e-12
        );
        assert!(points[0].sem_survival < 1e-15);
    }
}
