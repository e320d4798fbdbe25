// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors produced by the simulator.
///
/// Numeric payloads are carried as `f64` so the type is independent of the
/// scalar the computation ran on.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode index {index} out of range for a space with {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },

    #[error("space has no qubit factor")]
    NoQubit,

    #[error("invalid Fock space: {0}")]
    InvalidSpace(String),

    #[error("operators live on different Fock spaces")]
    SpaceMismatch,

    #[error("Bogoliubov identity violated: u^2 - v^2 - 1 = {residual:e}")]
    BogoliubovIdentity { residual: f64 },

    #[error("truncation too small: cutoff amplitude {amplitude:e} exceeds {threshold:e}")]
    TruncationTooSmall { amplitude: f64, threshold: f64 },

    #[error("negative dissipation rate Re(Gamma) = {0:e}")]
    NegativeRate(f64),

    #[error("hamiltonian is not Hermitian (max deviation {0:e})")]
    NonHermitian(f64),

    #[error("vectorized dimension {dim} exceeds the configured cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("step size underflow at t = {t:e} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("invariant violated: {what} = {value:e} (threshold {threshold:e})")]
    Invariant { what: &'static str, value: f64, threshold: f64 },

    #[error("steady state is not unique (pivot ratio {0:e})")]
    DegenerateSteadyState(f64),

    #[error("steady-state solve did not converge: residual {0:e}")]
    NoConvergence(f64),

    #[error("jump operator is not linear in the mode operators (residual {0:e})")]
    NonlinearJump(f64),

    #[error("drift matrix is not stable: max Re(eigenvalue) = {0:e}")]
    UnstableDrift(f64),

    #[error("effective coupling is imaginary: gbar^2 = {0:e}")]
    ImaginaryCoupling(f64),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("expected {expected} modes, got {got}")]
    WrongModeCount { expected: usize, got: usize },

    #[error("variance must be positive, got {0:e}")]
    NonPositiveVariance(f64),

    #[error("stroboscopic map did not contract after {iterations} iterations (last change {change:e})")]
    NotContractive { iterations: usize, change: f64 },

    #[error("trajectory not settled: relative drift {drift:e} over the final window")]
    NotSettled { drift: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
