//! Experiment configuration: JSON schema, validation, and construction of
//! core objects. Unknown fields are rejected everywhere.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use caslab_core::dynamics::{
    DecoherenceKind, DecoherenceSpec, DephasingBasis, InitialState, MeasurementMode,
};
use caslab_core::hamiltonians::{
    build_ising_with, build_nk_spin_glass_with, sigma_x, Boundary, IsingVariant,
    SpinChainHamiltonian,
};
use caslab_core::io::MatrixJson;
use caslab_core::measurement::{CouplingRule, MeasurementBasis, SiteMeasurementConfig};
use caslab_core::patterns::{ChshSettings, HybridForm, MixedBasisKind};
use caslab_core::quantum::StateVector;
use caslab_core::CompetitionConfig64;

use crate::error::CliError;

/// Top-level run configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; overridden by `--out`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Number of repetitions with derived seeds (outputs per repetition go
    /// into `rep_NNN/` subdirectories when greater than one).
    #[serde(default = "default_repeat")]
    pub repeat: usize,
    pub params: serde_json::Value,
    /// Parameter grid; only the `sweep` command accepts this block.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

fn default_repeat() -> usize {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Dotted paths into `params` mapped to the values each takes.
    pub grid: std::collections::BTreeMap<String, Vec<serde_json::Value>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Zeno,
    Trajectory,
    Competition,
    TemperatureSweep,
    NScaling,
    Spacing,
    Weak,
    Chsh,
    Patterns,
    Madelung,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Zeno => "zeno",
            ExperimentKind::Trajectory => "trajectory",
            ExperimentKind::Competition => "competition",
            ExperimentKind::TemperatureSweep => "temperature_sweep",
            ExperimentKind::NScaling => "n_scaling",
            ExperimentKind::Spacing => "spacing",
            ExperimentKind::Weak => "weak",
            ExperimentKind::Chsh => "chsh",
            ExperimentKind::Patterns => "patterns",
            ExperimentKind::Madelung => "madelung",
        }
    }
}

impl ExperimentConfig {
    pub fn from_str(text: &str) -> Result<Self, CliError> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::config(format!("{e}")))?;
        if config.repeat == 0 {
            return Err(CliError::config("repeat must be at least 1"));
        }
        Ok(config)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    /// Parse and validate the kind-specific parameter block.
    pub fn typed_params(&self) -> Result<TypedParams, CliError> {
        let p = self.params.clone();
        let typed = match self.experiment {
            ExperimentKind::Zeno => TypedParams::Zeno(parse(p)?),
            ExperimentKind::Trajectory => TypedParams::Trajectory(Box::new(parse(p)?)),
            ExperimentKind::Competition => TypedParams::Competition(parse(p)?),
            ExperimentKind::TemperatureSweep => TypedParams::TemperatureSweep(parse(p)?),
            ExperimentKind::NScaling => TypedParams::NScaling(parse(p)?),
            ExperimentKind::Spacing => TypedParams::Spacing(parse(p)?),
            ExperimentKind::Weak => TypedParams::Weak(parse(p)?),
            ExperimentKind::Chsh => TypedParams::Chsh(parse(p)?),
            ExperimentKind::Patterns => TypedParams::Patterns(parse(p)?),
            ExperimentKind::Madelung => TypedParams::Madelung(parse(p)?),
        };
        typed.validate()?;
        Ok(typed)
    }
}

fn parse<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::config(format!("invalid params: {e}")))
}

#[derive(Clone, Debug)]
pub enum TypedParams {
    Zeno(ZenoParams),
    Trajectory(Box<TrajectoryParams>),
    Competition(CompetitionConfig64),
    TemperatureSweep(TemperatureSweepParams),
    NScaling(NScalingParams),
    Spacing(SpacingParams),
    Weak(WeakParams),
    Chsh(ChshParams),
    Patterns(PatternsParams),
    Madelung(MadelungParams),
}

impl TypedParams {
    fn validate(&self) -> Result<(), CliError> {
        match self {
            TypedParams::Zeno(p) => p.validate(),
            TypedParams::Trajectory(p) => p.validate(),
            TypedParams::Competition(c) => c.validate().map_err(CliError::from_config_err),
            TypedParams::TemperatureSweep(p) => p.validate(),
            TypedParams::NScaling(p) => p.validate(),
            TypedParams::Spacing(p) => p.validate(),
            TypedParams::Weak(p) => p.validate(),
            TypedParams::Chsh(p) => p.validate(),
            TypedParams::Patterns(p) => p.validate(),
            TypedParams::Madelung(p) => p.validate(),
        }
    }
}

/// Hamiltonian construction recipes.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    IsingZ {
        length: usize,
        coupling: f64,
        #[serde(default)]
        transverse_field: f64,
        #[serde(default)]
        boundary: Boundary,
    },
    IsingXyz {
        length: usize,
        coupling: f64,
        #[serde(default)]
        transverse_field: f64,
        #[serde(default)]
        boundary: Boundary,
    },
    Nk {
        sites: usize,
        ruggedness: usize,
        #[serde(default = "default_field")]
        transverse_field: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Rabi qubit `H = (Ω/2) σ^x`.
    Rabi { omega: f64 },
    Custom {
        length: usize,
        matrix: MatrixJson,
    },
}

fn default_field() -> f64 {
    1.0
}

impl HamiltonianSpec {
    pub fn build(&self) -> Result<SpinChainHamiltonian<f64>, CliError> {
        match self {
            HamiltonianSpec::IsingZ {
                length,
                coupling,
                transverse_field,
                boundary,
            } => build_ising_with(
                *length,
                *coupling,
                IsingVariant::ZOnly,
                *transverse_field,
                *boundary,
            )
            .map_err(CliError::from_config_err),
            HamiltonianSpec::IsingXyz {
                length,
                coupling,
                transverse_field,
                boundary,
            } => build_ising_with(
                *length,
                *coupling,
                IsingVariant::Xyz,
                *transverse_field,
                *boundary,
            )
            .map_err(CliError::from_config_err),
            HamiltonianSpec::Nk {
                sites,
                ruggedness,
                transverse_field,
                seed,
            } => build_nk_spin_glass_with(*sites, *ruggedness, *transverse_field, *seed)
                .map_err(CliError::from_config_err),
            HamiltonianSpec::Rabi { omega } => {
                let m = sigma_x::<f64>() * Complex::new(omega / 2.0, 0.0);
                SpinChainHamiltonian::custom(m, 1).map_err(CliError::from_config_err)
            }
            HamiltonianSpec::Custom { length, matrix } => {
                let dim = 1usize << *length;
                let m: DMatrix<Complex<f64>> = matrix
                    .to_square_matrix(dim)
                    .ok_or_else(|| CliError::config("custom matrix has wrong length"))?;
                SpinChainHamiltonian::custom(m, *length).map_err(CliError::from_config_err)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZenoParams {
    pub omega: f64,
    pub t_total: f64,
    pub measurements: usize,
}

impl ZenoParams {
    fn validate(&self) -> Result<(), CliError> {
        if !self.omega.is_finite() || !self.t_total.is_finite() {
            return Err(CliError::config("omega and t_total must be finite"));
        }
        if self.measurements == 0 {
            return Err(CliError::config("measurements must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementParams {
    pub p_site: f64,
    #[serde(default)]
    pub basis: MeasurementBasis,
    #[serde(default = "default_coupling")]
    pub coupling_rule: CouplingRule<f64>,
}

fn default_coupling() -> CouplingRule<f64> {
    CouplingRule::FixedP
}

impl MeasurementParams {
    pub fn build(&self) -> Result<SiteMeasurementConfig<f64>, CliError> {
        let cfg = SiteMeasurementConfig {
            p_site: self.p_site,
            basis: self.basis,
            coupling_rule: self.coupling_rule,
        };
        cfg.validate().map_err(CliError::from_config_err)?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoherenceParams {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub basis: DephasingBasis,
}

impl Default for DecoherenceParams {
    fn default() -> Self {
        Self {
            kind: "none".to_string(),
            gamma: None,
            tau: None,
            alpha: None,
            basis: DephasingBasis::PauliZProduct,
        }
    }
}

impl DecoherenceParams {
    pub fn build(&self) -> Result<DecoherenceSpec<f64>, CliError> {
        let kind = match self.kind.as_str() {
            "none" => DecoherenceKind::None,
            "exponential" => DecoherenceKind::Exponential {
                gamma: self
                    .gamma
                    .ok_or_else(|| CliError::config("exponential decoherence needs gamma"))?,
            },
            "power_law" => DecoherenceKind::PowerLaw {
                tau: self
                    .tau
                    .ok_or_else(|| CliError::config("power_law decoherence needs tau"))?,
                alpha: self
                    .alpha
                    .ok_or_else(|| CliError::config("power_law decoherence needs alpha"))?,
            },
            other => {
                return Err(CliError::config(format!(
                    "unknown decoherence kind {other:?}"
                )))
            }
        };
        kind.validate().map_err(CliError::from_config_err)?;
        Ok(DecoherenceSpec {
            kind,
            basis: self.basis,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryParams {
    pub hamiltonian: HamiltonianSpec,
    pub dt: f64,
    pub steps: usize,
    pub measurement: MeasurementParams,
    #[serde(default)]
    pub decoherence: DecoherenceParams,
    #[serde(default)]
    pub mode: MeasurementMode,
    pub initial_state: InitialState<f64>,
    #[serde(default = "default_trajectories")]
    pub trajectories: usize,
}

fn default_trajectories() -> usize {
    1
}

impl TrajectoryParams {
    fn validate(&self) -> Result<(), CliError> {
        if self.trajectories == 0 {
            return Err(CliError::config("trajectories must be at least 1"));
        }
        self.measurement.build()?;
        self.decoherence.build()?;
        self.hamiltonian.build()?;
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(CliError::config("dt must be positive and finite"));
        }
        if self.steps == 0 {
            return Err(CliError::config("steps must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureSweepParams {
    pub competition: CompetitionConfig64,
    pub temperatures: Vec<f64>,
    pub runs_per_point: usize,
}

impl TemperatureSweepParams {
    fn validate(&self) -> Result<(), CliError> {
        self.competition
            .validate()
            .map_err(CliError::from_config_err)?;
        if self.temperatures.len() < 2 {
            return Err(CliError::config("need at least two temperatures"));
        }
        if self.runs_per_point == 0 {
            return Err(CliError::config("runs_per_point must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NScalingParams {
    pub competition: CompetitionConfig64,
    pub n_values: Vec<usize>,
    pub runs_per_n: usize,
}

impl NScalingParams {
    fn validate(&self) -> Result<(), CliError> {
        self.competition
            .validate()
            .map_err(CliError::from_config_err)?;
        if self.n_values.is_empty() {
            return Err(CliError::config("n_values must not be empty"));
        }
        if self.n_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::config("n_values must be strictly increasing"));
        }
        if self.runs_per_n == 0 {
            return Err(CliError::config("runs_per_n must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpacingSource {
    Hamiltonian { hamiltonian: HamiltonianSpec },
    Synthetic { distribution: String, count: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacingParams {
    pub source: SpacingSource,
    #[serde(default = "default_unfold_degree")]
    pub unfold_degree: usize,
}

fn default_unfold_degree() -> usize {
    5
}

impl SpacingParams {
    fn validate(&self) -> Result<(), CliError> {
        match &self.source {
            SpacingSource::Hamiltonian { hamiltonian } => {
                hamiltonian.build()?;
            }
            SpacingSource::Synthetic {
                distribution,
                count,
            } => {
                if !matches!(distribution.as_str(), "poisson" | "wigner") {
                    return Err(CliError::config(format!(
                        "unknown synthetic distribution {distribution:?}"
                    )));
                }
                if *count < 16 {
                    return Err(CliError::config("synthetic count must be at least 16"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservableSpec {
    Pauli { axis: String },
    Custom { matrix: MatrixJson },
}

impl ObservableSpec {
    pub fn build(&self) -> Result<DMatrix<Complex<f64>>, CliError> {
        match self {
            ObservableSpec::Pauli { axis } => match axis.as_str() {
                "x" => Ok(caslab_core::hamiltonians::sigma_x()),
                "y" => Ok(caslab_core::hamiltonians::sigma_y()),
                "z" => Ok(caslab_core::hamiltonians::sigma_z()),
                other => Err(CliError::config(format!("unknown Pauli axis {other:?}"))),
            },
            ObservableSpec::Custom { matrix } => {
                let dim = matrix.dims.iter().product();
                matrix
                    .to_square_matrix(dim)
                    .ok_or_else(|| CliError::config("observable matrix has wrong length"))
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Zero,
    One,
    Plus,
    Minus,
    Custom { state: MatrixJson },
}

impl StateSpec {
    pub fn build(&self) -> Result<StateVector<f64>, CliError> {
        use caslab_core::quantum::SubsystemLayout;
        use nalgebra::DVector;
        let qubit = |a: Complex<f64>, b: Complex<f64>| {
            StateVector::new(
                SubsystemLayout::qubits(1).expect("valid"),
                DVector::from_vec(vec![a, b]),
            )
            .map_err(CliError::from_config_err)
        };
        let one = Complex::new(1.0, 0.0);
        match self {
            StateSpec::Zero => qubit(one, Complex::new(0.0, 0.0)),
            StateSpec::One => qubit(Complex::new(0.0, 0.0), one),
            StateSpec::Plus => qubit(one, one),
            StateSpec::Minus => qubit(one, -one),
            StateSpec::Custom { state } => {
                let layout = SubsystemLayout::new(state.dims.clone())
                    .map_err(CliError::from_config_err)?;
                let v = state
                    .to_vector()
                    .ok_or_else(|| CliError::config("state vector has mismatched arrays"))?;
                StateVector::new(layout, v).map_err(CliError::from_config_err)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakParams {
    pub observable: ObservableSpec,
    pub coupling_g: f64,
    pub pointer_sigma: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_grid_extent")]
    pub grid_extent_sigmas: f64,
    pub state: StateSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub postselect: Option<StateSpec>,
}

fn default_grid_points() -> usize {
    512
}

fn default_grid_extent() -> f64 {
    8.0
}

impl WeakParams {
    fn validate(&self) -> Result<(), CliError> {
        self.observable.build()?;
        self.state.build()?;
        if let Some(ps) = &self.postselect {
            ps.build()?;
        }
        if !(self.pointer_sigma > 0.0) {
            return Err(CliError::config("pointer_sigma must be positive"));
        }
        if !(self.grid_extent_sigmas > 0.0) {
            return Err(CliError::config("grid_extent_sigmas must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshParams {
    #[serde(default = "default_basis_kind")]
    pub basis_kind: MixedBasisKind,
    pub form: HybridForm<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settings: Option<ChshSettings<f64>>,
    #[serde(default)]
    pub optimize: bool,
    /// When set, sweep the `a` angle over this many points of `[−π, π)`
    /// with the remaining angles fixed (from `settings` or the optimum).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_points: Option<usize>,
}

fn default_basis_kind() -> MixedBasisKind {
    MixedBasisKind::PositionSpin
}

impl ChshParams {
    fn validate(&self) -> Result<(), CliError> {
        if self.settings.is_none() && !self.optimize {
            return Err(CliError::config(
                "chsh needs explicit settings or optimize = true",
            ));
        }
        if let Some(n) = self.sweep_points {
            if n < 2 {
                return Err(CliError::config("sweep_points must be at least 2"));
            }
        }
        caslab_core::patterns::build_hybrid_state(self.basis_kind, &self.form)
            .map_err(CliError::from_config_err)?;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternsParams {
    pub peptide_length: usize,
    #[serde(default = "default_pattern_count")]
    pub count: usize,
}

fn default_pattern_count() -> usize {
    1
}

impl PatternsParams {
    fn validate(&self) -> Result<(), CliError> {
        if self.peptide_length < 10 {
            return Err(CliError::config(
                "peptide_length must be at least 10 to host the labels",
            ));
        }
        if self.count == 0 {
            return Err(CliError::config("count must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MadelungProfile {
    Gaussian {
        sigma: f64,
        #[serde(default)]
        k0: f64,
    },
    OscillatorGround { omega: f64 },
    OscillatorExcited { omega: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MadelungParams {
    pub profile: MadelungProfile,
    #[serde(default = "default_madelung_points")]
    pub n_points: usize,
    #[serde(default = "default_madelung_extent")]
    pub extent: f64,
    #[serde(default = "default_one")]
    pub hbar: f64,
    #[serde(default = "default_one")]
    pub mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar_scan: Option<Vec<f64>>,
}

fn default_madelung_points() -> usize {
    512
}

fn default_madelung_extent() -> f64 {
    8.0
}

fn default_one() -> f64 {
    1.0
}

impl MadelungParams {
    fn validate(&self) -> Result<(), CliError> {
        if self.n_points < 16 {
            return Err(CliError::config("n_points must be at least 16"));
        }
        if !(self.extent > 0.0) || !(self.hbar > 0.0) || !(self.mass > 0.0) {
            return Err(CliError::config("extent, hbar and mass must be positive"));
        }
        if let Some(scan) = &self.hbar_scan {
            if scan.is_empty()
                || scan.iter().any(|&h| !(h > 0.0))
                || scan.windows(2).any(|w| w[1] >= w[0])
            {
                return Err(CliError::config(
                    "hbar_scan must be strictly decreasing and positive",
                ));
            }
        }
        Ok(())
    }
}
