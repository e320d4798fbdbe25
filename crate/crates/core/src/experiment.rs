// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

//! Sweep orchestration and output files.
//!
//! Every run writes its table(s) plus `manifest.json`. Sweep points are
//! computed on the current rayon pool and written in grid order, so the CSV
//! files are byte-identical between runs of the same configuration.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ContinuumSweepConfig, ExperimentConfig, ExperimentKind, OracleConfig, SingleSweepConfig};
use crate::continuum::{
    band_flags, analyze_point, omega_ref_sensitivity, pair_parameters, stroboscopic_steady, default_strobe_dt,
    DriveConfig, Dynamics, PairConfigs, PairOptions, StrobeOptions, PAIR_VACUUM_VARIANCE,
};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::hilbert::{FockSpace, Op};
use crate::master::{apply_term, apply_term_literal, steady_state, LindbladTerm, TRUNCATION_TOL};
use crate::metrics::{squeezing_db, two_mode_quadrature_variance, ValidityFlag};
use crate::num::{c, Complex};
use crate::oracle::{compare_effective, effective_coupling_check, simulate_full, FullTrajectory, OracleComparison};
use crate::singlemode::{analyze, ideal_db, Backend, BuildOptions, SingleModeParams};

pub const SINGLE_SWEEP_HEADER: [&str; 12] = [
    "eta2_over_eta1",
    "Q",
    "kappa",
    "gamma_sq_re",
    "var_x",
    "var_p",
    "S_db",
    "S_db_ideal",
    "occ_bare",
    "occ_D",
    "flag_gsq_over_gammaq",
    "flag_trunc",
];

pub const CONTINUUM_SWEEP_HEADER: [&str; 12] = [
    "nu",
    "Q",
    "u_nu",
    "v_nu",
    "gamma_sq_re",
    "gamma_sq_im",
    "occ_D",
    "occ_Dbar",
    "var_Xnu",
    "S_db",
    "S_db_fig3_convention",
    "flags",
];

pub const ORACLE_TRAJECTORY_HEADER: [&str; 8] =
    ["g", "t", "var_x", "var_p", "occupation", "qubit_excited", "purity", "truncation"];

pub const MANIFEST_FILE: &str = "manifest.json";

/// Shortest round-trip text; scientific notation outside `[1e-4, 1e6)`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // also folds −0
        "0".into()
    } else if !x.is_finite() || (1e-4..1e6).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn flag_cell(flag: Option<bool>) -> String {
    match flag {
        Some(true) => "1".into(),
        Some(false) => "0".into(),
        None => String::new(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointStatus {
    pub index: usize,
    pub label: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub flags: Vec<ValidityFlag>,
}

impl PointStatus {
    fn new(index: usize, label: String, outcome: std::result::Result<Vec<ValidityFlag>, &Error>) -> Self {
        match outcome {
            Ok(flags) => Self { index, label, status: "ok", error: None, flags },
            Err(e) => Self { index, label, status: "failed", error: Some(e.to_string()), flags: Vec::new() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingleRow {
    pub eta2_over_eta1: f64,
    pub q: f64,
    pub kappa: f64,
    pub gamma_sq_re: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub s_db: f64,
    pub s_db_ideal: f64,
    pub occ_bare: f64,
    pub occ_d: f64,
    pub flag_gsq_over_gammaq: Option<bool>,
    /// Only evaluated when a Fock solve ran.
    pub flag_trunc: Option<bool>,
    pub fock_mismatch: Option<f64>,
}

impl SingleRow {
    fn cells(&self) -> Vec<String> {
        let mut v: Vec<String> = [
            self.eta2_over_eta1,
            self.q,
            self.kappa,
            self.gamma_sq_re,
            self.var_x,
            self.var_p,
            self.s_db,
            self.s_db_ideal,
            self.occ_bare,
            self.occ_d,
        ]
        .iter()
        .map(|&x| fmt_f64(x))
        .collect();
        v.push(flag_cell(self.flag_gsq_over_gammaq));
        v.push(flag_cell(self.flag_trunc));
        v
    }
}

fn single_point(p: &SingleModeParams<f64>, opts: &BuildOptions, backend: Backend) -> Result<(SingleRow, Vec<ValidityFlag>)> {
    let r = analyze(p, opts, backend)?;
    let mut flags = r.report.flags.clone();
    if let Some(m) = r.fock_mismatch {
        flags.push(ValidityFlag::new("fock_mismatch", m, 1e-6));
    }
    let tripped = |name: &str| r.report.flag(name).map(ValidityFlag::tripped);
    let row = SingleRow {
        eta2_over_eta1: p.eta2 / p.eta1,
        q: p.q,
        kappa: p.kappa(),
        gamma_sq_re: r.gamma_sq.re,
        var_x: r.report.var_x,
        var_p: r.report.var_p,
        s_db: r.report.s_db,
        s_db_ideal: ideal_db(&r.pair)?,
        occ_bare: r.report.occ_bare[0],
        occ_d: r.report.occ_d,
        flag_gsq_over_gammaq: tripped("gsq_over_gammaq"),
        flag_trunc: tripped("truncation"),
        fock_mismatch: r.fock_mismatch,
    };
    Ok((row, flags))
}

/// One row per `(Q, η₂/η₁)`; failed points keep their grid values and carry
/// NaN elsewhere.
pub fn single_sweep(cfg: &SingleSweepConfig, backend: Backend) -> (Vec<SingleRow>, Vec<PointStatus>) {
    let opts = cfg.build_options();
    let points = cfg.points();
    let results: Vec<_> = points
        .par_iter()
        .map(|&(ratio, q)| {
            let p = cfg.params(ratio, q);
            (p.clone(), single_point(&p, &opts, backend))
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut status = Vec::with_capacity(results.len());
    for (i, (p, res)) in results.into_iter().enumerate() {
        let label = format!("Q={} eta2/eta1={}", fmt_f64(p.q), fmt_f64(p.eta2 / p.eta1));
        match res {
            Ok((row, flags)) => {
                rows.push(row);
                status.push(PointStatus::new(i, label, Ok(flags)));
            }
            Err(e) => {
                rows.push(SingleRow {
                    eta2_over_eta1: p.eta2 / p.eta1,
                    q: p.q,
                    kappa: p.kappa(),
                    gamma_sq_re: f64::NAN,
                    var_x: f64::NAN,
                    var_p: f64::NAN,
                    s_db: f64::NAN,
                    s_db_ideal: f64::NAN,
                    occ_bare: f64::NAN,
                    occ_d: f64::NAN,
                    flag_gsq_over_gammaq: None,
                    flag_trunc: None,
                    fock_mismatch: None,
                });
                status.push(PointStatus::new(i, label, Err(&e)));
            }
        }
    }
    (rows, status)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuumRow {
    pub nu: f64,
    pub q: f64,
    pub u_nu: f64,
    pub v_nu: f64,
    pub gamma_sq_re: f64,
    pub gamma_sq_im: f64,
    pub occ_d: f64,
    pub occ_dbar: f64,
    pub var_x_nu: f64,
    pub s_db: f64,
    pub s_db_fig3_convention: f64,
    /// Tripped flag names; `failed` first when the point has no steady state.
    pub flags: Vec<String>,
}

impl ContinuumRow {
    fn cells(&self) -> Vec<String> {
        let mut v: Vec<String> = [
            self.nu,
            self.q,
            self.u_nu,
            self.v_nu,
            self.gamma_sq_re,
            self.gamma_sq_im,
            self.occ_d,
            self.occ_dbar,
            self.var_x_nu,
            self.s_db,
            self.s_db_fig3_convention,
        ]
        .iter()
        .map(|&x| fmt_f64(x))
        .collect();
        v.push(self.flags.join(";"));
        v
    }
}

/// Steady state of the averaged pair in Fock space, cross-checked against
/// the Gaussian moments. Returns the Fock moments, the truncation
/// population and the relative covariance mismatch.
fn fock_pair(configs: &PairConfigs<f64>, opts: &PairOptions, dim: usize, gaussian: &GaussianState<f64>) -> Result<(GaussianState<f64>, f64, f64)> {
    let spec = configs.averaged_model(opts)?.to_fock(&FockSpace::two_mode(dim, dim)?)?;
    let rho = steady_state(&spec)?;
    let state = GaussianState::from_density(&rho)?;
    let mismatch = crate::singlemode::relative_mismatch(&gaussian.cov, &state.cov);
    Ok((state, rho.truncation_population(), mismatch))
}

fn continuum_point(nu: f64, q: f64, cfg: &ContinuumSweepConfig, band: &[ValidityFlag], backend: Backend) -> Result<(ContinuumRow, Vec<ValidityFlag>)> {
    let p = cfg.params(q);
    let opts = cfg.sweep_options();
    let pt = analyze_point(nu, &p, &opts, band)?;
    let mut flags = pt.report.flags.clone();
    let d = &pt.configs.d;
    let mut row = ContinuumRow {
        nu,
        q,
        u_nu: d.pair.u,
        v_nu: d.pair.v,
        gamma_sq_re: d.gamma_sq.re,
        gamma_sq_im: d.gamma_sq.im,
        occ_d: pt.report.occ_d,
        occ_dbar: pt.report.occ_dbar.unwrap_or(f64::NAN),
        var_x_nu: pt.report.var_x,
        s_db: pt.report.s_db,
        s_db_fig3_convention: pt.s_db_unnormalized,
        flags: Vec::new(),
    };
    if let Some(s) = &pt.strobe {
        flags.push(ValidityFlag::new("strobe_vs_averaged", s.relative_mismatch, 1e-2));
    }
    if backend != Backend::Gaussian {
        let (state, trunc, mismatch) = fock_pair(&pt.configs, &opts.terms, cfg.fock_dim, &pt.state)?;
        flags.push(ValidityFlag::new("truncation", trunc, TRUNCATION_TOL));
        flags.push(ValidityFlag::new("fock_mismatch", mismatch, 1e-6));
        if backend == Backend::Fock {
            let var = two_mode_quadrature_variance(&state, (0, 1))?;
            row.var_x_nu = var;
            row.s_db = squeezing_db(var, PAIR_VACUUM_VARIANCE)?;
            row.s_db_fig3_convention = -10.0 * var.sqrt().log10();
            row.occ_d = pt.configs.d.occupation(&state)?;
            row.occ_dbar = pt.configs.dbar.occupation(&state)?;
        }
    }
    row.flags = flags.iter().filter(|f| f.tripped()).map(|f| f.name.clone()).collect();
    Ok((row, flags))
}

/// One row per `(Q, ν)`, `Q` outer. A point without a steady state (for
/// example an unstable band edge) becomes a row with NaN moments and the
/// `failed` flag; its error goes to the status list.
pub fn continuum_sweep(cfg: &ContinuumSweepConfig, backend: Backend) -> Result<(Vec<ContinuumRow>, Vec<PointStatus>)> {
    let mut tasks = Vec::new();
    let mut bands = Vec::with_capacity(cfg.q_values.len());
    for (k, &q) in cfg.q_values.iter().enumerate() {
        let p = cfg.params(q);
        bands.push(band_flags(&p)?);
        tasks.extend(p.grid().into_iter().map(|nu| (k, nu, q)));
    }
    let results: Vec<_> =
        tasks.par_iter().map(|&(k, nu, q)| continuum_point(nu, q, cfg, &bands[k], backend)).collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut status = Vec::with_capacity(results.len());
    for (i, (&(k, nu, q), res)) in tasks.iter().zip(results).enumerate() {
        let label = format!("Q={} nu={}", fmt_f64(q), fmt_f64(nu));
        match res {
            Ok((row, flags)) => {
                rows.push(row);
                status.push(PointStatus::new(i, label, Ok(flags)));
            }
            Err(e) => {
                let d = pair_parameters(nu, &cfg.params(q), DriveConfig::D)?;
                let mut flags = vec!["failed".to_string()];
                flags.extend(bands[k].iter().filter(|f| f.tripped()).map(|f| f.name.clone()));
                rows.push(ContinuumRow {
                    nu,
                    q,
                    u_nu: d.pair.u,
                    v_nu: d.pair.v,
                    gamma_sq_re: d.gamma_sq.re,
                    gamma_sq_im: d.gamma_sq.im,
                    occ_d: f64::NAN,
                    occ_dbar: f64::NAN,
                    var_x_nu: f64::NAN,
                    s_db: f64::NAN,
                    s_db_fig3_convention: f64::NAN,
                    flags,
                });
                let mut st = PointStatus::new(i, label, Err(&e));
                st.flags = bands[k].clone();
                status.push(st);
            }
        }
    }
    Ok((rows, status))
}

#[derive(Debug, Serialize)]
pub struct OracleRun {
    pub g: f64,
    pub horizon: f64,
    #[serde(skip)]
    pub trajectory: Option<FullTrajectory>,
    pub accepted_steps: Option<usize>,
    pub comparison: Option<OracleComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub seconds: f64,
}

/// Full-model runs for every `g` in parallel, then the sideband check for
/// every configured `η` on the first drive.
pub fn oracle_runs(cfg: &OracleConfig) -> Result<(Vec<OracleRun>, Value)> {
    let runs: Vec<OracleRun> = cfg
        .g_values
        .par_iter()
        .map(|&g| {
            let t0 = Instant::now();
            let outcome = cfg.params(g).and_then(|p| {
                let tr = simulate_full(&p)?;
                let cmp = compare_effective(&tr, &p);
                Ok((p.horizon, tr, cmp))
            });
            let seconds = t0.elapsed().as_secs_f64();
            match outcome {
                Ok((horizon, tr, cmp)) => {
                    let (comparison, error) = match cmp {
                        Ok(c) => (Some(c), None),
                        Err(e) => (None, Some(e.to_string())),
                    };
                    OracleRun { g, horizon, accepted_steps: Some(tr.accepted_steps), trajectory: Some(tr), comparison, error, seconds }
                }
                Err(e) => OracleRun { g, horizon: f64::NAN, trajectory: None, accepted_steps: None, comparison: None, error: Some(e.to_string()), seconds },
            }
        })
        .collect();
    let wd1 = cfg.epsilon - cfg.omega0;
    let mut sidebands = Vec::with_capacity(cfg.sideband_etas.len());
    for &eta in &cfg.sideband_etas {
        let r = effective_coupling_check(1.0, &[(wd1, eta)])?;
        sidebands.push(json!({ "eta": eta, "report": r }));
    }
    // discrepancy in order of decreasing g
    let mut by_g: Vec<(f64, f64)> =
        runs.iter().filter_map(|r| r.comparison.as_ref().map(|c| (r.g, c.rel_err_var_x))).collect();
    by_g.sort_by(|a, b| b.0.total_cmp(&a.0));
    let shrinks = by_g.len() >= 2 && by_g.windows(2).all(|w| w[1].1 < w[0].1);
    let summary = json!({
        "runs": runs,
        "discrepancy_shrinks_with_g": if by_g.len() >= 2 { Value::Bool(shrinks) } else { Value::Null },
        "sideband_checks": sidebands,
    });
    Ok((runs, summary))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

impl Check {
    fn below(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value < threshold, value, threshold }
    }

    fn above(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value > threshold, value, threshold }
    }
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex<f64> {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(d, d, |_, _| random_complex(rng))
}

/// Invariant suite behind `validate`. Random instances come from `seed`.
pub fn validate_suite(seed: u64, instances: usize) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let ideal = analyze(&SingleModeParams::reference(0.12, 1e8), &BuildOptions::IDEAL, Backend::Both)?;
    checks.push(Check::below("single_ideal_dark_state_occ_d", ideal.report.occ_d.abs(), 1e-8));
    checks.push(Check::below("single_ideal_var_x", (ideal.report.var_x - 0.25).abs(), 1e-6));

    let sweep = SingleSweepConfig { include_corrections: false, include_loss: false, ..Default::default() };
    let mut closure = 0.0f64;
    let mut uncertainty = f64::INFINITY;
    for (r, q) in sweep.points() {
        let res = analyze(&sweep.params(r, q), &BuildOptions::IDEAL, Backend::Gaussian)?;
        closure = closure.max((res.report.s_db - ideal_db(&res.pair)?).abs());
        uncertainty = uncertainty.min(res.report.var_x * res.report.var_p);
    }
    checks.push(Check::below("single_ideal_db_closure", closure, 1e-9));
    checks.push(Check::above("min_var_x_var_p", uncertainty, 1.0 - 1e-8));

    let band = ContinuumSweepConfig::default().params(1e6);
    let mut identity = 0.0f64;
    for nu in band.grid() {
        for config in [DriveConfig::D, DriveConfig::Dbar] {
            let pair = pair_parameters(nu, &band, config)?.pair;
            identity = identity.max((pair.u * pair.u - pair.v * pair.v - 1.0).abs());
        }
    }
    checks.push(Check::below("bogoliubov_identity_band", identity, 1e-12));

    let mut occ = 0.0f64;
    for nu in band.grid() {
        let configs = PairConfigs::new(nu, &band)?;
        let s = configs.averaged_steady(&PairOptions::IDEAL)?;
        occ = occ.max(configs.d.occupation(&s)? + configs.dbar.occupation(&s)?);
    }
    checks.push(Check::below("averaged_ideal_dark_pair", occ, 1e-8));

    let dt = default_strobe_dt(&band)?;
    let strobe = stroboscopic_steady(0.0, &band, &PairOptions::FULL, dt, &StrobeOptions::default())?;
    checks.push(Check::below("strobe_matches_averaged", strobe.relative_mismatch, 1e-4));

    let space = FockSpace::single_mode(4)?;
    let mut forms = 0.0f64;
    for _ in 0..instances {
        let op = Op::from_matrix(&space, random_matrix(&mut rng, 4))?;
        let gamma = c(rng.random_range(0.01..2.0), rng.random_range(-2.0..2.0));
        let a = random_matrix(&mut rng, 4);
        let rho = &a * a.adjoint();
        let rho = &rho / rho.trace();
        let term = LindbladTerm::new(op, gamma)?;
        let diff = (apply_term(&term, &rho)? - apply_term_literal(&term, &rho)?).camax();
        forms = forms.max(diff);
    }
    checks.push(Check::below("complex_rate_forms", forms, 1e-12));

    let mut backends = 0.0f64;
    for _ in 0..instances.min(5) {
        let mut p = SingleModeParams::reference(0.0, 10f64.powf(rng.random_range(4.0..8.0)));
        p.eta2 = p.eta1 * rng.random_range(0.0..0.6);
        p.g = rng.random_range(0.3..1.0);
        let r = analyze(&p, &BuildOptions::FULL, Backend::Both)?;
        backends = backends.max(r.fock_mismatch.unwrap_or(f64::INFINITY));
    }
    checks.push(Check::below("single_fock_vs_gaussian", backends, 1e-6));
    Ok(checks)
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub phase: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    pub timings: Vec<Timing>,
    pub total_seconds: f64,
    pub outputs: Vec<String>,
    pub points: Vec<PointStatus>,
    pub summary: Value,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub manifest: Manifest,
    /// False when a `validate` check failed.
    pub passed: bool,
}

fn write_csv<R, I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new().from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for row in rows {
        w.write_record(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value).map_err(|e| Error::Io(e.to_string()))?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Runs the experiment on the current rayon pool and writes its outputs to
/// `out`. Point failures are recorded, not raised.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path, jobs: Option<usize>) -> Result<RunOutcome> {
    cfg.validate()?;
    let cfg = cfg.clone().resolved();
    fs::create_dir_all(out)?;
    let start = Instant::now();
    let mut timings = Vec::new();
    let mut outputs = Vec::new();
    let mut points = Vec::new();
    let mut passed = true;
    let summary = match cfg.kind {
        ExperimentKind::SingleSweep => {
            let sc = cfg.single_sweep.as_ref().expect("resolved");
            let (rows, status) = single_sweep(sc, cfg.backend);
            timings.push(Timing { phase: "sweep".into(), seconds: start.elapsed().as_secs_f64() });
            write_csv(&out.join("single_sweep.csv"), &SINGLE_SWEEP_HEADER, rows.iter().map(SingleRow::cells))?;
            outputs.push("single_sweep.csv".to_string());
            let failed = status.iter().filter(|s| s.status != "ok").count();
            points = status;
            json!({ "rows": rows.len(), "failed_points": failed })
        }
        ExperimentKind::ContinuumSweep => {
            let cc = cfg.continuum_sweep.as_ref().expect("resolved");
            let (rows, status) = continuum_sweep(cc, cfg.backend)?;
            timings.push(Timing { phase: "sweep".into(), seconds: start.elapsed().as_secs_f64() });
            write_csv(&out.join("continuum_sweep.csv"), &CONTINUUM_SWEEP_HEADER, rows.iter().map(ContinuumRow::cells))?;
            outputs.push("continuum_sweep.csv".to_string());
            let t1 = Instant::now();
            let mut sensitivity = Vec::new();
            for &q in &cc.q_values {
                let res = omega_ref_sensitivity(&cc.params(q), &cc.sweep_options());
                sensitivity.push(match res {
                    Ok(v) => json!({ "Q": q, "omega_ref_vs_S_db_center": v }),
                    Err(e) => json!({ "Q": q, "error": e.to_string() }),
                });
            }
            timings.push(Timing { phase: "omega_ref_sensitivity".into(), seconds: t1.elapsed().as_secs_f64() });
            let failed = status.iter().filter(|s| s.status != "ok").count();
            points = status;
            let averaged = cc.dynamics == Dynamics::Averaged;
            json!({ "rows": rows.len(), "failed_points": failed, "averaged_dynamics": averaged, "omega_ref_sensitivity": sensitivity })
        }
        ExperimentKind::Oracle => {
            let oc = cfg.oracle.as_ref().expect("resolved");
            let (runs, summary) = oracle_runs(oc)?;
            timings.push(Timing { phase: "oracle".into(), seconds: start.elapsed().as_secs_f64() });
            let rows = runs.iter().flat_map(|r| {
                r.trajectory.iter().flat_map(move |tr| {
                    tr.samples.iter().map(move |s| {
                        [r.g, s.t, s.var_x, s.var_p, s.occupation, s.qubit_excited, s.purity, s.truncation]
                            .iter()
                            .map(|&x| fmt_f64(x))
                            .collect::<Vec<_>>()
                    })
                })
            });
            write_csv(&out.join("oracle_trajectory.csv"), &ORACLE_TRAJECTORY_HEADER, rows)?;
            write_json(&out.join("oracle_summary.json"), &summary)?;
            outputs.extend(["oracle_trajectory.csv".to_string(), "oracle_summary.json".to_string()]);
            points = runs
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let flags = r
                        .comparison
                        .as_ref()
                        .map(|c| {
                            vec![
                                ValidityFlag::new("gsq_over_gammaq", c.gsq_over_gammaq, 0.1),
                                ValidityFlag::new("gammaq_over_e", c.max_gammaq_over_e, 0.1),
                                ValidityFlag::new("truncation", c.max_truncation, TRUNCATION_TOL),
                            ]
                        })
                        .unwrap_or_default();
                    let label = format!("g={}", fmt_f64(r.g));
                    match &r.error {
                        None => PointStatus::new(i, label, Ok(flags)),
                        Some(e) => PointStatus { index: i, label, status: "failed", error: Some(e.clone()), flags },
                    }
                })
                .collect();
            summary
        }
        ExperimentKind::Validate => {
            let vc = cfg.validate.as_ref().expect("resolved");
            let checks = validate_suite(cfg.seed, vc.instances)?;
            timings.push(Timing { phase: "validate".into(), seconds: start.elapsed().as_secs_f64() });
            passed = checks.iter().all(|c| c.passed);
            let report = json!({ "passed": passed, "seed": cfg.seed, "checks": checks });
            write_json(&out.join("validate.json"), &report)?;
            outputs.push("validate.json".to_string());
            report
        }
    };
    outputs.push(MANIFEST_FILE.to_string());
    let manifest = Manifest {
        tool: "squeezecool",
        version: env!("CARGO_PKG_VERSION"),
        kind: cfg.kind,
        config: cfg.clone(),
        jobs,
        timings,
        total_seconds: start.elapsed().as_secs_f64(),
        outputs,
        points,
        summary,
    };
    write_json(&out.join(MANIFEST_FILE), &manifest)?;
    Ok(RunOutcome { manifest, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Linspace;

    #[test]
    fn number_format_round_trips() {
        for x in [0.0, 1e5, 0.25, 1e-9, -3.5e7, 6.020599913279624, f64::NAN] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert!(back == x || (x.is_nan() && back.is_nan()), "{x} -> {s}");
        }
        assert_eq!(fmt_f64(1e5), "100000");
        assert_eq!(fmt_f64(1e8), "1e8");
        assert_eq!(fmt_f64(-0.0), "0");
    }

    #[test]
    fn small_single_sweep_rows() {
        let cfg = SingleSweepConfig {
            eta_ratio: Linspace { start: 0.0, stop: 0.6, points: 3 },
            q_values: vec![1e6, 1e8],
            ..Default::default()
        };
        let (rows, status) = single_sweep(&cfg, Backend::Gaussian);
        assert_eq!(rows.len(), 6);
        assert!(status.iter().all(|s| s.status == "ok"));
        assert_eq!((rows[4].eta2_over_eta1, rows[4].q), (0.3, 1e8));
        assert!((rows[5].s_db_ideal - 6.020599913279624).abs() < 1e-9);
        assert_eq!(rows[0].flag_trunc, None);
        assert_eq!(rows[0].cells().len(), SINGLE_SWEEP_HEADER.len());
    }

    #[test]
    fn unstable_points_become_failed_rows() {
        let cfg = ContinuumSweepConfig { q_values: vec![1e6], n_nu: 41, ..Default::default() };
        let (rows, status) = continuum_sweep(&cfg, Backend::Gaussian).unwrap();
        assert_eq!(rows.len(), 41);
        let failed: Vec<_> = rows.iter().filter(|r| r.flags.first().map(String::as_str) == Some("failed")).collect();
        assert_eq!(failed.len(), status.iter().filter(|s| s.status == "failed").count());
        for r in &failed {
            assert!(r.s_db.is_nan() && r.u_nu.is_finite());
        }
        let center = &rows[20];
        assert_eq!(center.nu, 0.0);
        assert!(center.s_db > 10.0);
        assert_eq!(center.cells().len(), CONTINUUM_SWEEP_HEADER.len());
    }
}
