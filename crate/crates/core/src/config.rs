// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

//! TOML experiment configuration.
//!
//! A file names its `kind` and may carry the matching parameter table;
//! missing tables and keys fall back to the reference setups.
//!
//! ```toml
//! kind = "single_sweep"
//! backend = "gaussian"
//!
//! [single_sweep]
//! q_values = [1e5, 1e6, 1e7, 1e8]
//! eta_ratio = { start = 0.0, stop = 0.96, points = 25 }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::continuum::{ContinuumParams, DbarForm, Dynamics, PairOptions, StrobeOptions, SweepOptions};
use crate::error::{Error, Result};
use crate::oracle::{FullModelParams, DEFAULT_HORIZON_GSQ, DEFAULT_SAMPLES};
use crate::singlemode::{Backend, BuildOptions, DriveTuning, SingleModeParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SingleSweep,
    ContinuumSweep,
    Oracle,
    Validate,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SingleSweep => "single_sweep",
            ExperimentKind::ContinuumSweep => "continuum_sweep",
            ExperimentKind::Oracle => "oracle",
            ExperimentKind::Validate => "validate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub backend: Backend,
    /// Seed for the randomized checks of `validate`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub single_sweep: Option<SingleSweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuum_sweep: Option<ContinuumSweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validate: Option<ValidateConfig>,
}

/// Evenly spaced points, both ends included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Linspace {
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n).map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

/// Single-mode steady states over `η₂/η₁` and `Q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SingleSweepConfig {
    pub epsilon: f64,
    pub omega0: f64,
    pub gamma_q: f64,
    pub g: f64,
    pub eta1: f64,
    pub fock_dim: usize,
    pub eta_ratio: Linspace,
    pub q_values: Vec<f64>,
    pub tuning: DriveTuning,
    pub include_corrections: bool,
    pub include_loss: bool,
}

impl Default for SingleSweepConfig {
    fn default() -> Self {
        let r = SingleModeParams::<f64>::reference(0.0, 1.0);
        Self {
            epsilon: r.epsilon,
            omega0: r.omega0,
            gamma_q: r.gamma_q,
            g: r.g,
            eta1: r.eta1,
            fock_dim: r.fock_dim,
            eta_ratio: Linspace { start: 0.0, stop: 0.96, points: 25 },
            q_values: vec![1e5, 1e6, 1e7, 1e8],
            tuning: DriveTuning::Dressed,
            include_corrections: true,
            include_loss: true,
        }
    }
}

impl SingleSweepConfig {
    pub fn params(&self, ratio: f64, q: f64) -> SingleModeParams<f64> {
        SingleModeParams {
            epsilon: self.epsilon,
            omega0: self.omega0,
            gamma_q: self.gamma_q,
            g: self.g,
            eta1: self.eta1,
            eta2: ratio * self.eta1,
            q,
            fock_dim: self.fock_dim,
        }
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions { include_corrections: self.include_corrections, include_loss: self.include_loss, tuning: self.tuning }
    }

    /// `(η₂/η₁, Q)` in output order: `Q` outer, ratio inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let ratios = self.eta_ratio.values();
        self.q_values.iter().flat_map(|&q| ratios.iter().map(move |&r| (r, q))).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.eta_ratio.points == 0 || self.q_values.is_empty() {
            return Err(Error::Config("single_sweep: empty eta_ratio or q_values grid".into()));
        }
        for (r, q) in self.points() {
            let p = self.params(r, q);
            p.validate()?;
            if !(r >= 0.0 && r < 1.0) {
                return Err(Error::Config(format!("single_sweep: eta2/eta1 = {r} outside [0, 1)")));
            }
        }
        Ok(())
    }
}

/// Waveguide band sweep over `ν` and `Q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuumSweepConfig {
    pub epsilon: f64,
    pub omega_a: f64,
    pub omega_b: f64,
    pub alpha: f64,
    pub delta_omega: f64,
    pub nu_max: f64,
    pub n_nu: usize,
    pub eta1: f64,
    pub eta2: f64,
    pub q_values: Vec<f64>,
    pub strobe_dt: Option<f64>,
    pub omega_ref: Option<f64>,
    pub dbar_form: DbarForm,
    pub freq_ratio_threshold: f64,
    pub fock_dim: usize,
    pub dynamics: Dynamics,
    pub include_corrections: bool,
    pub include_loss: bool,
    pub strobe_tol: f64,
    pub strobe_max_iterations: usize,
}

impl Default for ContinuumSweepConfig {
    fn default() -> Self {
        let r = ContinuumParams::<f64>::reference(1.0);
        let s = StrobeOptions::default();
        Self {
            epsilon: r.epsilon,
            omega_a: r.omega_a,
            omega_b: r.omega_b,
            alpha: r.alpha,
            delta_omega: r.delta_omega,
            nu_max: r.nu_max,
            n_nu: r.n_nu,
            eta1: r.eta1,
            eta2: r.eta2,
            q_values: vec![1e3, 1e4, 1e5, 1e6],
            strobe_dt: None,
            omega_ref: None,
            dbar_form: DbarForm::Commuting,
            freq_ratio_threshold: r.freq_ratio_threshold,
            fock_dim: r.fock_dim,
            dynamics: Dynamics::Stroboscopic,
            include_corrections: true,
            include_loss: true,
            strobe_tol: s.tol,
            strobe_max_iterations: s.max_iterations,
        }
    }
}

impl ContinuumSweepConfig {
    pub fn params(&self, q: f64) -> ContinuumParams<f64> {
        ContinuumParams {
            epsilon: self.epsilon,
            omega_a: self.omega_a,
            omega_b: self.omega_b,
            alpha: self.alpha,
            delta_omega: self.delta_omega,
            nu_max: self.nu_max,
            n_nu: self.n_nu,
            q,
            eta1: self.eta1,
            eta2: self.eta2,
            strobe_dt: self.strobe_dt,
            omega_ref: self.omega_ref,
            dbar_form: self.dbar_form,
            freq_ratio_threshold: self.freq_ratio_threshold,
            fock_dim: self.fock_dim,
        }
    }

    pub fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            dynamics: self.dynamics,
            terms: PairOptions { include_corrections: self.include_corrections, include_loss: self.include_loss },
            strobe: StrobeOptions { tol: self.strobe_tol, max_iterations: self.strobe_max_iterations },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q_values.is_empty() {
            return Err(Error::Config("continuum_sweep: empty q_values".into()));
        }
        if !(self.strobe_tol > 0.0) || self.strobe_max_iterations == 0 {
            return Err(Error::Config("continuum_sweep: strobe_tol and strobe_max_iterations must be positive".into()));
        }
        for &q in &self.q_values {
            self.params(q).validate()?;
        }
        Ok(())
    }
}

/// Full qubit-cavity runs at several couplings, plus the sideband check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub epsilon: f64,
    pub omega0: f64,
    pub gamma_q: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub g_values: Vec<f64>,
    pub fock_dim: usize,
    /// Horizon in units of `1/Γ^sq`.
    pub horizon_gsq: f64,
    pub samples: usize,
    pub include_loss: bool,
    pub q: f64,
    pub tuning: DriveTuning,
    pub max_step: f64,
    pub tol: f64,
    /// Drive amplitudes for the single-drive sideband check.
    pub sideband_etas: Vec<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            epsilon: 10.0,
            omega0: 3.5,
            gamma_q: 0.2,
            eta1: 0.2,
            eta2: 0.12,
            g_values: vec![0.1, 0.05],
            fock_dim: 15,
            horizon_gsq: DEFAULT_HORIZON_GSQ,
            samples: DEFAULT_SAMPLES,
            include_loss: false,
            q: 1e8,
            tuning: DriveTuning::Dressed,
            max_step: 0.05,
            tol: 1e-9,
            sideband_etas: vec![0.05, 0.2],
        }
    }
}

impl OracleConfig {
    pub fn params(&self, g: f64) -> Result<FullModelParams<f64>> {
        let base = SingleModeParams {
            epsilon: self.epsilon,
            omega0: self.omega0,
            gamma_q: self.gamma_q,
            g,
            eta1: self.eta1,
            eta2: self.eta2,
            q: self.q,
            fock_dim: self.fock_dim,
        };
        let mut p = FullModelParams::from_single(base, self.tuning)?;
        p.horizon = p.horizon / DEFAULT_HORIZON_GSQ * self.horizon_gsq;
        p.stride = p.horizon / self.samples as f64;
        p.include_loss = self.include_loss;
        p.max_step = self.max_step;
        p.tol = self.tol;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.g_values.is_empty() || self.samples < 10 {
            return Err(Error::Config("oracle: need at least one g value and 10 samples".into()));
        }
        if self.sideband_etas.iter().any(|&e| !(e >= 0.0 && e <= 0.3)) {
            return Err(Error::Config("oracle: sideband_etas must lie in [0, 0.3]".into()));
        }
        if !(self.horizon_gsq > 0.0) {
            return Err(Error::Config("oracle: horizon_gsq must be positive".into()));
        }
        for &g in &self.g_values {
            self.params(g)?.validate()?;
        }
        Ok(())
    }
}

/// Invariant suite knobs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    /// Random instances for the complex-rate and backend checks.
    pub instances: usize,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self { instances: 20 }
    }
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self { kind, backend: Backend::default(), seed: 0, single_sweep: None, continuum_sweep: None, oracle: None, validate: None }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    /// Fills in the table for `kind` so the manifest records every value.
    pub fn resolved(mut self) -> Self {
        match self.kind {
            ExperimentKind::SingleSweep => {
                self.single_sweep.get_or_insert_with(Default::default);
            }
            ExperimentKind::ContinuumSweep => {
                self.continuum_sweep.get_or_insert_with(Default::default);
            }
            ExperimentKind::Oracle => {
                self.oracle.get_or_insert_with(Default::default);
            }
            ExperimentKind::Validate => {
                self.validate.get_or_insert_with(Default::default);
            }
        }
        self
    }

    /// Rejects tables that belong to another kind, then checks the
    /// parameters of this one.
    pub fn validate(&self) -> Result<()> {
        let present = [
            (ExperimentKind::SingleSweep, self.single_sweep.is_some()),
            (ExperimentKind::ContinuumSweep, self.continuum_sweep.is_some()),
            (ExperimentKind::Oracle, self.oracle.is_some()),
            (ExperimentKind::Validate, self.validate.is_some()),
        ];
        for (kind, here) in present {
            if here && kind != self.kind {
                return Err(Error::Config(format!("table [{}] given for kind {}", kind.name(), self.kind.name())));
            }
        }
        let r = self.clone().resolved();
        match self.kind {
            ExperimentKind::SingleSweep => r.single_sweep.as_ref().map_or(Ok(()), SingleSweepConfig::validate),
            ExperimentKind::ContinuumSweep => {
                if self.backend != Backend::Gaussian {
                    let c = r.continuum_sweep.as_ref().expect("resolved");
                    if c.dynamics != Dynamics::Averaged {
                        return Err(Error::Config("continuum_sweep: the fock backend needs dynamics = \"averaged\"".into()));
                    }
                }
                r.continuum_sweep.as_ref().map_or(Ok(()), ContinuumSweepConfig::validate)
            }
            ExperimentKind::Oracle => r.oracle.as_ref().map_or(Ok(()), OracleConfig::validate),
            ExperimentKind::Validate => {
                if r.validate.as_ref().is_some_and(|v| v.instances == 0) {
                    return Err(Error::Config("validate: instances must be positive".into()));
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_resolves_to_reference_sweep() {
        let cfg = ExperimentConfig::from_toml_str("kind = \"single_sweep\"").unwrap().resolved();
        let s = cfg.single_sweep.unwrap();
        assert_eq!(s.points().len(), 100);
        assert_eq!(s.points()[1], (0.04, 1e5));
        assert!((s.eta_ratio.values()[24] - 0.96).abs() < 1e-15);
        assert_eq!(cfg.backend, Backend::Gaussian);
    }

    #[test]
    fn schema_violations_are_rejected() {
        assert!(matches!(ExperimentConfig::from_toml_str("kind = \"nope\""), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::from_toml_str("kind = \"oracle\"\ncolour = 1"), Err(Error::Config(_))));
        let wrong_table = "kind = \"oracle\"\n[single_sweep]\ng = 1.0";
        assert!(matches!(ExperimentConfig::from_toml_str(wrong_table), Err(Error::Config(_))));
        let bad_ratio = "kind = \"single_sweep\"\n[single_sweep]\neta_ratio = { start = 0.5, stop = 1.0, points = 3 }";
        assert!(ExperimentConfig::from_toml_str(bad_ratio).is_err());
        let typo = "kind = \"continuum_sweep\"\n[continuum_sweep]\nq_value = [1e3]";
        assert!(matches!(ExperimentConfig::from_toml_str(typo), Err(Error::Config(_))));
        let fock = "kind = \"continuum_sweep\"\nbackend = \"fock\"";
        assert!(matches!(ExperimentConfig::from_toml_str(fock), Err(Error::Config(_))));
        assert!(ExperimentConfig::from_toml_str("kind = \"continuum_sweep\"\nbackend = \"fock\"\n[continuum_sweep]\ndynamics = \"averaged\"").is_ok());
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = ExperimentConfig::from_toml_str("kind = \"oracle\"\n[oracle]\ng_values = [0.2]").unwrap().resolved();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg);
        let p = cfg.oracle.unwrap().params(0.2).unwrap();
        assert!((p.stride * 400.0 - p.horizon).abs() < 1e-9 * p.horizon);
    }
}
