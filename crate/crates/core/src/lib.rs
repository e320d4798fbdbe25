// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

//! Dissipative squeezing of cavity and waveguide photon fields by a driven,
//! lossy qubit.
//!
//! All frequencies, rates and couplings are angular frequencies quoted in
//! GHz; the time unit is 1 ns.

pub mod bogoliubov;
pub mod config;
pub mod continuum;
pub mod error;
pub mod experiment;
pub mod gaussian;
pub mod hilbert;
pub mod linalg;
pub mod master;
pub mod metrics;
pub mod num;
pub mod oracle;
pub mod singlemode;
pub mod sparse;

pub use bogoliubov::BogoliubovPair;
pub use error::{Error, Result};
pub use hilbert::{FockSpace, Op};
pub use num::{Complex, Real};
pub use config::{ExperimentConfig, ExperimentKind};
pub use experiment::{run_experiment, RunOutcome};

/// Double-precision aliases for the generic types.
pub type SingleModeParams = singlemode::SingleModeParams<f64>;
pub type ContinuumParams = continuum::ContinuumParams<f64>;
pub type FullModelParams = oracle::FullModelParams<f64>;
pub type GaussianState = gaussian::GaussianState<f64>;
pub type DensityMatrix = master::DensityMatrix<f64>;
pub type LiouvillianSpec = master::LiouvillianSpec<f64>;
pub type LinearModel = gaussian::LinearModel<f64>;
