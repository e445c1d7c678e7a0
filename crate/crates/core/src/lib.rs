//! # caslab-core
//!
//! A desk-scale quantum simulation laboratory: spin-chain dynamics under
//! stochastic measurement (many-body quantum Zeno physics), phenomenological
//! decoherence channels, weak measurement with pre/post-selection, an
//! event-driven basis-amplitude competition model, mixed-basis entanglement
//! with CHSH evaluation, and a 1-D Madelung/Bohmian decomposition toolkit.
//!
//! All numerics are generic over the scalar type through [`scalar::Real`]
//! (`f32` or `f64`); the `*64` aliases below are the intended defaults and
//! are what the validation suite and the `caslab` CLI pin their tolerances
//! to.

pub mod scalar;

pub mod competition;
pub mod dynamics;
pub mod hamiltonians;
pub mod io;
pub mod madelung;
pub mod measurement;
pub mod patterns;
pub mod quantum;
pub mod random;
pub mod stats;

pub use scalar::Real;

/// Complex scalar shorthand.
pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;

pub type StateVector64 = quantum::StateVector<f64>;
pub type StateVector32 = quantum::StateVector<f32>;
pub type DensityMatrix64 = quantum::DensityMatrix<f64>;
pub type DensityMatrix32 = quantum::DensityMatrix<f32>;
pub type SpinChainHamiltonian64 = hamiltonians::SpinChainHamiltonian<f64>;
pub type NonHermitianHamiltonian64 = hamiltonians::NonHermitianHamiltonian<f64>;
pub type SpectralStats64 = hamiltonians::SpectralStats<f64>;
pub type KrausSet64 = measurement::KrausSet<f64>;
pub type PovmSet64 = measurement::PovmSet<f64>;
pub type WeakMeasurementSetup64 = measurement::WeakMeasurementSetup<f64>;
pub type PrePostSelection64 = measurement::PrePostSelection<f64>;
pub type TrajectoryConfig64 = dynamics::TrajectoryConfig<f64>;
pub type TrajectoryRecord64 = dynamics::TrajectoryRecord<f64>;
pub type DecoherenceSpec64 = dynamics::DecoherenceSpec<f64>;
pub type CompetitionConfig64 = competition::CompetitionConfig<f64>;
pub type CompetitionRecord64 = competition::CompetitionRecord<f64>;
pub type HybridState64 = patterns::HybridState<f64>;
pub type GridWavefunction64 = madelung::GridWavefunction<f64>;
pub type HydroFields64 = madelung::HydroFields<f64>;
