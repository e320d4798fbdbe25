// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

//! Squeezing observables and validity bookkeeping.

use serde::Serialize;

use crate::bogoliubov::BogoliubovPair;
use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, LinearJump};
use crate::num::Real;

/// `−10·log₁₀(variance / vacuum_variance)`, dB below vacuum.
pub fn squeezing_db<T: Real>(variance: T, vacuum_variance: T) -> Result<T> {
    if !(variance > T::zero()) {
        return Err(Error::NonPositiveVariance(variance.as_f64()));
    }
    if !(vacuum_variance > T::zero()) {
        return Err(Error::NonPositiveVariance(vacuum_variance.as_f64()));
    }
    Ok(-T::lit(10.0) * (variance / vacuum_variance).log10())
}

/// Variance of `(x_i + x_j)/2`; the vacuum value is `1/2`.
pub fn two_mode_quadrature_variance<T: Real>(state: &GaussianState<T>, modes: (usize, usize)) -> Result<T> {
    if state.n_modes < 2 {
        return Err(Error::WrongModeCount { expected: 2, got: state.n_modes });
    }
    let (i, j) = modes;
    for m in [i, j] {
        if m >= state.n_modes {
            return Err(Error::ModeOutOfRange { index: m, modes: state.n_modes });
        }
    }
    let s = &state.cov;
    Ok((s[(2 * i, 2 * i)] + s[(2 * j, 2 * j)] + s[(2 * i, 2 * j)] * T::lit(2.0)) * T::lit(0.25))
}

/// Variance of `(p_i + p_j)/2`, the conjugate of the combination above.
pub fn two_mode_conjugate_variance<T: Real>(state: &GaussianState<T>, modes: (usize, usize)) -> Result<T> {
    let (i, j) = modes;
    for m in [i, j] {
        if m >= state.n_modes {
            return Err(Error::ModeOutOfRange { index: m, modes: state.n_modes });
        }
    }
    let s = &state.cov;
    let (a, b) = (2 * i + 1, 2 * j + 1);
    Ok((s[(a, a)] + s[(b, b)] + s[(a, b)] * T::lit(2.0)) * T::lit(0.25))
}

/// `<D†D>` for `D = u·a_{mode_a} + v·a_{mode_b}†` (single-mode form when the
/// modes coincide).
pub fn occupation_d<T: Real>(state: &GaussianState<T>, pair: &BogoliubovPair<T>, mode_a: usize, mode_b: usize) -> Result<T> {
    let jump = LinearJump::bogoliubov(state.n_modes, pair.u, pair.v, mode_a, mode_b)?;
    state.jump_occupation(&jump)
}

/// A named dimensionless ratio that should stay below a threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidityFlag {
    pub name: String,
    pub ratio: f64,
    pub threshold: f64,
}

impl ValidityFlag {
    pub fn new(name: impl Into<String>, ratio: f64, threshold: f64) -> Self {
        Self { name: name.into(), ratio, threshold }
    }

    pub fn tripped(&self) -> bool {
        !(self.ratio < self.threshold)
    }
}

/// Summary of one steady state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SqueezingReport {
    /// Variance of the squeezed quadrature (single mode: `x`; pair: `X_ν`).
    pub var_x: f64,
    /// Variance of the conjugate quadrature.
    pub var_p: f64,
    pub vacuum_variance: f64,
    pub s_db: f64,
    pub occ_bare: Vec<f64>,
    pub occ_d: f64,
    pub occ_dbar: Option<f64>,
    pub flags: Vec<ValidityFlag>,
}

impl SqueezingReport {
    pub fn any_flag(&self) -> bool {
        self.flags.iter().any(ValidityFlag::tripped)
    }

    pub fn flag(&self, name: &str) -> Option<&ValidityFlag> {
        self.flags.iter().find(|f| f.name == name)
    }
}
