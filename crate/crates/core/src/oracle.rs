// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

//! Brute-force check of the single-mode effective model: the driven qubit
//! and the cavity are integrated together, with the qubit's own decay as the
//! only approximation-free dissipator.
//!
//! The lab-frame Hamiltonian is
//! `H = (ε/2)σ_z + ω₀a†a + g(σ⁺ + σ⁻)(a + a†) − Σ_m η_m ω_m cos(ω_m t) σ_z`.
//! Integration runs in the interaction picture of `H₀ + H_d`, which is exact
//! because both parts are diagonal: `σ⁺ → σ⁺e^{iθ(t)}` with
//! `θ = εt − 2Σ_m η_m sin(ω_m t)`, and `a → a e^{−iω₀t}`. Every term of `H_I`
//! survives, counter-rotating ones included.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::lyapunov_steady;
use crate::hilbert::{create, destroy, number, qubit_lower, qubit_raise, qubit_z, FockSpace, Op};
use crate::master::{
    evolve_timedep_sampled, trace_product, DensityMatrix, Drive, EvolveOptions, IntegrationStats, LindbladTerm,
    LiouvillianSpec, TimeDependentSpec,
};
use crate::num::{c, cabs, cis, cr, Complex, Real};
use crate::singlemode::{
    effective_rates, linear_model, sideband_decomposition, BuildOptions, DriveTuning, SingleModeParams,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FullModelParams<T> {
    pub base: SingleModeParams<T>,
    /// `(ω_{d,m}, η_m)`.
    pub drives: Vec<(T, T)>,
    /// Adds cavity loss `κ = ω₀/Q`.
    pub include_loss: bool,
    /// Integration horizon.
    pub horizon: T,
    /// Sampling stride.
    pub stride: T,
    /// The cavity moments are reported in the frame rotating at this
    /// frequency.
    pub frame_frequency: T,
    pub max_step: T,
    pub tol: T,
    /// Tuning the drives were derived with (for the effective reference).
    pub tuning: DriveTuning,
}

/// Horizon in units of `1/Γ^sq`.
pub const DEFAULT_HORIZON_GSQ: f64 = 20.0;
pub const DEFAULT_SAMPLES: usize = 400;

impl<T: Real> FullModelParams<T> {
    /// The two drives of the effective model, `ω_{d,1,2} = ε ∓ ω_c` with
    /// amplitudes `η₁, η₂`, where `ω_c` is `ω₀` (bare) or `ω₀ + δ` (dressed).
    /// Horizon `20/Γ^sq`, 400 samples, no cavity loss.
    pub fn from_single(base: SingleModeParams<T>, tuning: DriveTuning) -> Result<Self> {
        let dec = sideband_decomposition(&base)?;
        let rates = effective_rates(&base, &dec);
        let wc = match tuning {
            DriveTuning::Bare => base.omega0,
            DriveTuning::Dressed => base.omega0 + rates.cavity_shift(&dec),
        };
        let horizon = T::lit(DEFAULT_HORIZON_GSQ) / rates.gamma_sq.re;
        Ok(Self {
            drives: vec![(base.epsilon - wc, base.eta1), (base.epsilon + wc, base.eta2)],
            include_loss: false,
            horizon,
            stride: horizon / T::lit(DEFAULT_SAMPLES as f64),
            frame_frequency: wc,
            max_step: T::lit(0.05),
            tol: T::tol(1e-9),
            tuning,
            base,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        for (name, x) in [("horizon", self.horizon), ("stride", self.stride), ("max_step", self.max_step), ("tol", self.tol)] {
            if !(x > T::zero()) {
                return Err(Error::InvalidParameter { name, reason: format!("must be positive, got {x}") });
            }
        }
        for &(w, eta) in &self.drives {
            if !(w > T::zero()) || !(eta >= T::zero()) {
                return Err(Error::InvalidParameter {
                    name: "drives",
                    reason: format!("need positive frequency and non-negative amplitude, got ({w}, {eta})"),
                });
            }
        }
        Ok(())
    }

    pub fn space(&self) -> Result<FockSpace> {
        FockSpace::qubit_and_mode(self.base.fock_dim)
    }

    /// `θ(t) − εt = −2Σ_m η_m sin(ω_m t)`.
    pub fn drive_phase(&self, t: T) -> T {
        self.drives.iter().fold(T::zero(), |s, &(w, eta)| s - T::lit(2.0) * eta * (w * t).sin())
    }

    fn dissipators(&self, space: &FockSpace) -> Result<Vec<LindbladTerm<T>>> {
        let mut terms = vec![LindbladTerm::new(qubit_lower(space)?, cr(self.base.gamma_q))?];
        if self.include_loss {
            terms.push(LindbladTerm::new(destroy(space, 0)?, cr(self.base.kappa()))?);
        }
        Ok(terms)
    }

    fn static_hamiltonian(&self, space: &FockSpace) -> Result<Op<T>> {
        let half = T::lit(0.5);
        let x = destroy::<T>(space, 0)?.add(&create(space, 0)?)?;
        let sx = qubit_lower::<T>(space)?.add(&qubit_raise(space)?)?;
        qubit_z::<T>(space)?
            .scale(cr(self.base.epsilon * half))
            .add(&number::<T>(space, 0)?.scale(cr(self.base.omega0)))?
            .add(&sx.mul(&x)?.scale(cr(self.base.g)))
    }

    /// `−Σ_m η_m ω_m cos(ω_m t)`, the coefficient of `σ_z` in `H_d`.
    fn drive_amplitude(&self, t: T) -> T {
        self.drives.iter().fold(T::zero(), |s, &(w, eta)| s - eta * w * (w * t).cos())
    }
}

/// Lab-frame generator frozen at time `t`.
pub fn lab_frame_generator<T: Real>(p: &FullModelParams<T>, t: T) -> Result<LiouvillianSpec<T>> {
    let space = p.space()?;
    let h = p.static_hamiltonian(&space)?.add(&qubit_z::<T>(&space)?.scale(cr(p.drive_amplitude(t))))?;
    LiouvillianSpec::new(h, p.dissipators(&space)?)
}

/// Lab-frame generator as a drive on `σ_z`: `c(t)σ_z + c̄(t)σ_z` with
/// `c = H_d/2`.
pub fn lab_frame_spec<T: Real>(p: &FullModelParams<T>) -> Result<TimeDependentSpec<T>> {
    let space = p.space()?;
    let base = LiouvillianSpec::new(p.static_hamiltonian(&space)?, p.dissipators(&space)?)?;
    let q = p.clone();
    let coeff = Arc::new(move |t: T| cr(q.drive_amplitude(t) * T::lit(0.5)));
    Ok(TimeDependentSpec::Modulated { base, drives: vec![Drive { op: qubit_z(&space)?, coeff }] })
}

/// Interaction-picture generator: `H(t) = g e^{i(θ−ω₀t)} σ⁺a + g e^{i(θ+ω₀t)} σ⁺a† + h.c.`
pub fn interaction_frame_spec<T: Real>(p: &FullModelParams<T>) -> Result<TimeDependentSpec<T>> {
    let space = p.space()?;
    let base = LiouvillianSpec::dissipative(&space, p.dissipators(&space)?)?;
    let sp = qubit_raise::<T>(&space)?;
    let lower = sp.mul(&destroy(&space, 0)?)?;
    let raise = sp.mul(&create(&space, 0)?)?;
    let mut drives = Vec::with_capacity(2);
    for (op, sign) in [(lower, -T::one()), (raise, T::one())] {
        let q = p.clone();
        let coeff = Arc::new(move |t: T| {
            let theta = q.base.epsilon * t + q.drive_phase(t);
            cis(theta + sign * q.base.omega0 * t) * cr(q.base.g)
        });
        drives.push(Drive { op, coeff });
    }
    Ok(TimeDependentSpec::Modulated { base, drives })
}

/// `U(t)†ρU(t)` with `U = exp(−i[(θ/2)σ_z + ω₀t·a†a])`: lab frame to
/// interaction frame.
pub fn lab_to_interaction<T: Real>(p: &FullModelParams<T>, t: T, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    let space = rho.space().clone();
    let theta = p.base.epsilon * t + p.drive_phase(t);
    let half = T::lit(0.5);
    let phases: Vec<Complex<T>> = (0..space.dim())
        .map(|i| {
            let (qubit, modes) = space.decompose(i);
            let s = if qubit == Some(1) { T::one() } else { -T::one() };
            let n = T::from_usize(modes[0]).expect("level");
            cis(-(s * theta * half + p.base.omega0 * t * n))
        })
        .collect();
    let m = rho.matrix();
    let out = nalgebra::DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| phases[i].conj() * m[(i, j)] * phases[j]);
    DensityMatrix::new(&space, out)
}

/// Observables at one sample time. Quadratures refer to the frame rotating
/// at `frame_frequency`; vacuum variance is 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub occupation: f64,
    pub qubit_excited: f64,
    pub purity: f64,
    pub truncation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FullTrajectory {
    pub samples: Vec<TrajectorySample>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evals: usize,
}

struct Observables<T: Real> {
    a: Op<T>,
    a2: Op<T>,
    n: Op<T>,
}

fn sample<T: Real>(p: &FullModelParams<T>, obs: &Observables<T>, t: T, rho: &DensityMatrix<T>) -> Result<TrajectorySample> {
    let m = rho.matrix();
    // the interaction picture already rotates at ω₀
    let rot = cis((p.frame_frequency - p.base.omega0) * t);
    let ea = trace_product(obs.a.matrix(), m) * rot;
    let ea2 = trace_product(obs.a2.matrix(), m) * rot * rot;
    let n = trace_product(obs.n.matrix(), m).re;
    let (one, two, four) = (T::one(), T::lit(2.0), T::lit(4.0));
    let var_x = two * n + one + two * ea2.re - four * ea.re * ea.re;
    let var_p = two * n + one - two * ea2.re - four * ea.im * ea.im;
    Ok(TrajectorySample {
        t: t.as_f64(),
        var_x: var_x.as_f64(),
        var_p: var_p.as_f64(),
        occupation: n.as_f64(),
        qubit_excited: rho.qubit_excited_population()?.as_f64(),
        purity: rho.purity().as_f64(),
        truncation: rho.top_levels_population(0)?.as_f64(),
    })
}

/// Integrates from `|g⟩ ⊗ |0⟩` and samples every `stride` up to `horizon`.
/// Trace, Hermiticity and positivity are enforced at every sample by the
/// integrator.
pub fn simulate_full<T: Real>(p: &FullModelParams<T>) -> Result<FullTrajectory> {
    p.validate()?;
    let space = p.space()?;
    let spec = interaction_frame_spec(p)?;
    let a = destroy::<T>(&space, 0)?;
    let obs = Observables { a2: a.mul(&a)?, n: number(&space, 0)?, a };
    let mut times = Vec::new();
    let mut k = 1usize;
    loop {
        let t = p.stride * T::from_usize(k).expect("sample index");
        if t > p.horizon * (T::one() + T::lit(1e-12)) {
            break;
        }
        times.push(t);
        k += 1;
    }
    let opts = EvolveOptions { tol: p.tol, max_step: Some(p.max_step), initial_step: None };
    let mut samples = Vec::with_capacity(times.len() + 1);
    let rho0 = DensityMatrix::ground(&space);
    samples.push(sample(p, &obs, T::zero(), &rho0)?);
    let stats: IntegrationStats = evolve_timedep_sampled(&rho0, &spec, &times, &opts, |t, rho| {
        samples.push(sample(p, &obs, t, rho)?);
        Ok(())
    })?;
    Ok(FullTrajectory {
        samples,
        accepted_steps: stats.accepted,
        rejected_steps: stats.rejected,
        rhs_evals: stats.rhs_evals,
    })
}

/// Relative drift allowed over the final tenth of the horizon.
pub const SETTLE_TOL: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleComparison {
    pub g: f64,
    /// Mean over the final tenth of the horizon.
    pub late_var_x: f64,
    pub late_var_p: f64,
    pub late_occupation: f64,
    /// Ideal dark-state values `(u − v)²`, `(u + v)²`, `v²`.
    pub ideal_var_x: f64,
    pub ideal_var_p: f64,
    pub ideal_occupation: f64,
    /// Effective model including the correction channels.
    pub corrected_var_x: f64,
    pub corrected_var_p: f64,
    pub rel_err_var_x: f64,
    pub rel_err_var_p: f64,
    pub rel_err_occupation: f64,
    pub rel_err_var_x_corrected: f64,
    pub drift: f64,
    pub max_qubit_excited: f64,
    /// `3Γ^sq/γ_q`.
    pub qubit_bound: f64,
    pub min_purity: f64,
    pub max_truncation: f64,
    pub gsq_over_gammaq: f64,
    pub max_gammaq_over_e: f64,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// Late-time discrepancy against the effective model. The late window is the
/// final tenth of the horizon; its drift is the change between the means of
/// its two halves relative to the late mean.
pub fn compare_effective<T: Real>(traj: &FullTrajectory, p: &FullModelParams<T>) -> Result<OracleComparison> {
    let s = &traj.samples;
    let t_end = s.last().map(|x| x.t).ok_or(Error::NotSettled { drift: f64::INFINITY })?;
    let t_late = 0.9 * t_end;
    let t_mid = 0.95 * t_end;
    let late: Vec<&TrajectorySample> = s.iter().filter(|x| x.t >= t_late).collect();
    if late.len() < 4 {
        return Err(Error::InvalidParameter { name: "stride", reason: "fewer than 4 samples in the final tenth".into() });
    }
    let first = mean(late.iter().filter(|x| x.t < t_mid).map(|x| x.var_x));
    let second = mean(late.iter().filter(|x| x.t >= t_mid).map(|x| x.var_x));
    let late_var_x = mean(late.iter().map(|x| x.var_x));
    let drift = (second - first).abs() / late_var_x.abs();
    if !(drift < SETTLE_TOL) {
        return Err(Error::NotSettled { drift });
    }
    let dec = sideband_decomposition(&p.base)?;
    let rates = effective_rates(&p.base, &dec);
    let (u, v) = (dec.pair.u.as_f64(), dec.pair.v.as_f64());
    let opts = BuildOptions { include_corrections: true, include_loss: p.include_loss, tuning: p.tuning };
    let corrected = lyapunov_steady(&linear_model(&p.base, &opts)?.drift_diffusion()?)?;
    let late_var_p = mean(late.iter().map(|x| x.var_p));
    let late_occupation = mean(late.iter().map(|x| x.occupation));
    let (ivx, ivp, iocc) = ((u - v) * (u - v), (u + v) * (u + v), v * v);
    let cvx = corrected.var_x(0).as_f64();
    let gq = p.base.gamma_q;
    let max_gammaq_over_e = dec.corrections.iter().fold(0.0f64, |m, c| m.max((gq / c.e_lambda.abs()).as_f64()));
    Ok(OracleComparison {
        g: p.base.g.as_f64(),
        late_var_x,
        late_var_p,
        late_occupation,
        ideal_var_x: ivx,
        ideal_var_p: ivp,
        ideal_occupation: iocc,
        corrected_var_x: cvx,
        corrected_var_p: corrected.var_p(0).as_f64(),
        rel_err_var_x: (late_var_x - ivx).abs() / ivx,
        rel_err_var_p: (late_var_p - ivp).abs() / ivp,
        rel_err_occupation: if iocc > 0.0 { (late_occupation - iocc).abs() / iocc } else { late_occupation.abs() },
        rel_err_var_x_corrected: (late_var_x - cvx).abs() / cvx,
        drift,
        max_qubit_excited: s.iter().fold(0.0f64, |m, x| m.max(x.qubit_excited)),
        qubit_bound: (T::lit(3.0) * rates.gamma_sq.re / gq).as_f64(),
        min_purity: s.iter().fold(f64::INFINITY, |m, x| m.min(x.purity)),
        max_truncation: s.iter().fold(0.0f64, |m, x| m.max(x.truncation)),
        gsq_over_gammaq: (rates.gamma_sq.re / gq).as_f64(),
        max_gammaq_over_e,
    })
}

/// One Fourier line of the coupling `g·e^{iφ(t)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SidebandLine {
    pub frequency: f64,
    pub measured_re: f64,
    pub measured_im: f64,
    pub predicted: f64,
    pub relative_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SidebandReport {
    pub carrier: SidebandLine,
    /// `+ω_m` then `−ω_m` for every drive.
    pub sidebands: Vec<SidebandLine>,
    pub max_sideband_error: f64,
    pub max_eta: f64,
    /// `max relative error / max η²` over carrier and sidebands.
    pub fitted_c: f64,
}

/// Periods of the slowest drive in the Fourier window.
pub const FOURIER_PERIODS: usize = 64;
/// Samples per period of the fastest drive.
pub const FOURIER_RESOLUTION: usize = 64;

/// Fourier amplitudes of the exact phase factor at `{0, ±ω_m}`, compared
/// with the linear prediction `g` and `∓η_m g`. With commensurate drives the
/// window holds whole periods and the transform is exact up to rounding.
pub fn effective_coupling_check<T: Real>(g: T, drives: &[(T, T)]) -> Result<SidebandReport> {
    if !(g > T::zero()) {
        return Err(Error::InvalidParameter { name: "g", reason: format!("must be positive, got {g}") });
    }
    let two_pi = T::lit(std::f64::consts::TAU);
    let w_min = drives.iter().map(|d| d.0).fold(None, |m: Option<T>, w| Some(m.map_or(w, |m| m.min(w))));
    let w_max = drives.iter().fold(T::zero(), |m, d| m.max(d.0));
    if drives.iter().any(|&(w, _)| !(w > T::zero())) {
        return Err(Error::InvalidParameter { name: "drives", reason: "frequencies must be positive".into() });
    }
    let phase = |t: T| drives.iter().fold(T::zero(), |s, &(w, eta)| s - T::lit(2.0) * eta * (w * t).sin());
    let amplitude = |f: T| -> Complex<T> {
        let Some(w_min) = w_min else { return cr(g) };
        let window = two_pi / w_min * T::lit(FOURIER_PERIODS as f64);
        let per = ((w_max / w_min).as_f64() * FOURIER_PERIODS as f64 * FOURIER_RESOLUTION as f64).ceil() as usize;
        let n = T::from_usize(per).expect("sample count");
        let dt = window / n;
        let mut acc = c(T::zero(), T::zero());
        for k in 0..per {
            let t = dt * T::from_usize(k).expect("sample index");
            acc += cis(phase(t) - f * t);
        }
        acc * cr(g / n)
    };
    let line = |f: T, predicted: T| {
        let m = amplitude(f);
        SidebandLine {
            frequency: f.as_f64(),
            measured_re: m.re.as_f64(),
            measured_im: m.im.as_f64(),
            predicted: predicted.as_f64(),
            relative_error: (cabs(m - cr(predicted)) / predicted.abs()).as_f64(),
        }
    };
    let carrier = line(T::zero(), g);
    let mut sidebands = Vec::with_capacity(2 * drives.len());
    for &(w, eta) in drives {
        if eta > T::zero() {
            sidebands.push(line(w, -eta * g));
            sidebands.push(line(-w, eta * g));
        }
    }
    let max_sideband_error = sidebands.iter().fold(0.0f64, |m, l| m.max(l.relative_error));
    let max_eta = drives.iter().fold(0.0f64, |m, &(_, eta)| m.max(eta.as_f64()));
    let worst = max_sideband_error.max(carrier.relative_error);
    let fitted_c = if max_eta > 0.0 { worst / (max_eta * max_eta) } else { 0.0 };
    Ok(SidebandReport { carrier, sidebands, max_sideband_error, max_eta, fitted_c })
}
