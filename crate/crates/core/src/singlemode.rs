// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

//! Effective generator of a single cavity mode squeezed by a two-tone driven
//! qubit: the squeezing dissipator, seven off-resonant correction channels
//! and photon loss.

use serde::{Deserialize, Serialize};

use crate::bogoliubov::BogoliubovPair;
use crate::error::{Error, Result};
use crate::gaussian::{lyapunov_steady, GaussianState, LinearJump, LinearModel};
use crate::hilbert::FockSpace;
use crate::master::{steady_state, LiouvillianSpec};
use crate::metrics::{occupation_d, squeezing_db, SqueezingReport, ValidityFlag};
use crate::num::{c, cr, Complex, Real};

/// Physical parameters of the cavity setup (angular frequencies in GHz).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleModeParams<T> {
    /// Qubit gap ε.
    pub epsilon: T,
    /// Cavity frequency ω₀.
    pub omega0: T,
    /// Qubit decay rate γ_q (also the `γ` of the correction rates).
    pub gamma_q: T,
    /// Bare qubit-cavity coupling.
    pub g: T,
    pub eta1: T,
    pub eta2: T,
    /// Quality factor, `κ = ω₀/Q`.
    pub q: T,
    pub fock_dim: usize,
}

impl<T: Real> SingleModeParams<T> {
    /// ε = 10, ω₀ = 3.5, γ_q = 0.2, g = 1, η₁ = 0.2.
    pub fn reference(eta2: T, q: T) -> Self {
        Self {
            epsilon: T::lit(10.0),
            omega0: T::lit(3.5),
            gamma_q: T::lit(0.2),
            g: T::one(),
            eta1: T::lit(0.2),
            eta2,
            q,
            fock_dim: 30,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("epsilon", self.epsilon), ("omega0", self.omega0), ("gamma_q", self.gamma_q), ("g", self.g), ("q", self.q)];
        for (name, x) in positive {
            if !(x > T::zero()) {
                return Err(Error::InvalidParameter { name, reason: format!("must be positive, got {x}") });
            }
        }
        if !(self.eta2 >= T::zero()) {
            return Err(Error::InvalidParameter { name: "eta2", reason: format!("must be non-negative, got {}", self.eta2) });
        }
        if !(self.eta1 > self.eta2) {
            return Err(Error::ImaginaryCoupling(
                (self.g * self.g * (self.eta1 * self.eta1 - self.eta2 * self.eta2)).as_f64(),
            ));
        }
        if self.fock_dim < 2 {
            return Err(Error::InvalidParameter { name: "fock_dim", reason: "must be at least 2".into() });
        }
        Ok(())
    }

    /// `(ω_{d,1}, ω_{d,2}) = (ε − ω₀, ε + ω₀)`.
    pub fn drive_frequencies(&self) -> (T, T) {
        (self.epsilon - self.omega0, self.epsilon + self.omega0)
    }

    pub fn kappa(&self) -> T {
        self.omega0 / self.q
    }
}

/// Operator of a correction channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OpKind {
    Ddag,
    A,
    Adag,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Correction<T> {
    pub op: OpKind,
    pub g_lambda: T,
    pub e_lambda: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SidebandDecomposition<T: Real> {
    pub pair: BogoliubovPair<T>,
    pub corrections: Vec<Correction<T>>,
}

/// Resonant squeezing operator plus the seven terms rotating at `E_λ`.
pub fn sideband_decomposition<T: Real>(p: &SingleModeParams<T>) -> Result<SidebandDecomposition<T>> {
    p.validate()?;
    let pair = BogoliubovPair::from_sidebands(p.eta1 * p.g, p.eta2 * p.g)?;
    let (wd1, wd2) = p.drive_frequencies();
    let two = T::lit(2.0);
    let (g, e, w0) = (p.g, p.epsilon, p.omega0);
    let rows = [
        (OpKind::Ddag, -pair.gbar, -two * e),
        (OpKind::A, g, -wd1),
        (OpKind::A, -p.eta1 * g, -two * wd1),
        (OpKind::A, p.eta2 * g, two * w0),
        (OpKind::Adag, g, -wd2),
        (OpKind::Adag, -p.eta2 * g, -two * wd2),
        (OpKind::Adag, p.eta1 * g, -two * w0),
    ];
    let corrections = rows.iter().map(|&(op, g_lambda, e_lambda)| Correction { op, g_lambda, e_lambda }).collect();
    Ok(SidebandDecomposition { pair, corrections })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveRates<T: Real> {
    /// `2ḡ²/γ_q`.
    pub gamma_sq: Complex<T>,
    /// `2g_λ²/(−iE_λ + γ_q)`.
    pub gamma_lambda: Vec<Complex<T>>,
    pub kappa: T,
}

pub fn effective_rates<T: Real>(p: &SingleModeParams<T>, dec: &SidebandDecomposition<T>) -> EffectiveRates<T> {
    let two = T::lit(2.0);
    let gamma_sq = cr(two * dec.pair.gbar * dec.pair.gbar / p.gamma_q);
    let gamma_lambda = dec
        .corrections
        .iter()
        .map(|cor| cr(two * cor.g_lambda * cor.g_lambda) / c(p.gamma_q, -cor.e_lambda))
        .collect();
    EffectiveRates { gamma_sq, gamma_lambda, kappa: p.kappa() }
}

impl<T: Real> EffectiveRates<T> {
    /// Cavity frequency shift `δ = Σ Im Γ^λ / 2` over the `a` and `a†`
    /// channels. Their Hamiltonian parts are `(Im Γ^λ/2)·a†a` up to
    /// constants.
    pub fn cavity_shift(&self, dec: &SidebandDecomposition<T>) -> T {
        dec.corrections
            .iter()
            .zip(&self.gamma_lambda)
            .filter(|(cor, _)| cor.op != OpKind::Ddag)
            .fold(T::zero(), |s, (_, g)| s + g.im * T::lit(0.5))
    }
}

/// Which cavity frequency the two drives are tuned to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriveTuning {
    /// `ω_d = ε ∓ ω₀`: the correction channels' frequency shift stays in
    /// the generator as a detuning.
    Bare,
    /// Drives follow the shifted cavity, `ω_d = ε ∓ (ω₀ + δ)`; in the frame
    /// of the shifted cavity the detuning cancels.
    #[default]
    Dressed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub include_corrections: bool,
    pub include_loss: bool,
    #[serde(default)]
    pub tuning: DriveTuning,
}

impl BuildOptions {
    pub const IDEAL: Self = Self { include_corrections: false, include_loss: false, tuning: DriveTuning::Dressed };
    pub const FULL: Self = Self { include_corrections: true, include_loss: true, tuning: DriveTuning::Dressed };
}

/// Single-mode model with linear jumps, usable by both backends.
pub fn linear_model<T: Real>(p: &SingleModeParams<T>, opts: &BuildOptions) -> Result<LinearModel<T>> {
    let dec = sideband_decomposition(p)?;
    let rates = effective_rates(p, &dec);
    let zero = cr(T::zero());
    let mut model = LinearModel::new(1);
    model.push(LinearJump::bogoliubov(1, dec.pair.u, dec.pair.v, 0, 0)?, rates.gamma_sq)?;
    if opts.include_corrections {
        for (cor, &gamma) in dec.corrections.iter().zip(&rates.gamma_lambda) {
            let jump = match cor.op {
                OpKind::Ddag => LinearJump::single(1, 0, cr(dec.pair.v), cr(dec.pair.u))?,
                OpKind::A => LinearJump::single(1, 0, cr(T::one()), zero)?,
                OpKind::Adag => LinearJump::single(1, 0, zero, cr(T::one()))?,
            };
            model.push(jump, gamma)?;
        }
        if opts.tuning == DriveTuning::Dressed {
            model.hamiltonian.add_number(0, -rates.cavity_shift(&dec))?;
        }
    }
    if opts.include_loss {
        model.push(LinearJump::single(1, 0, cr(T::one()), zero)?, cr(rates.kappa))?;
    }
    Ok(model)
}

pub fn build_single_mode_liouvillian<T: Real>(p: &SingleModeParams<T>, opts: &BuildOptions) -> Result<LiouvillianSpec<T>> {
    let space = FockSpace::single_mode(p.fock_dim)?;
    linear_model(p, opts)?.to_fock(&space)
}

/// Default threshold for the "≪" validity ratios.
pub const VALIDITY_THRESHOLD: f64 = 0.1;

/// `Γ^sq/γ_q` and `γ_q / min(ω₀, ω_{d,1}, ε)`.
pub fn validity_flags<T: Real>(p: &SingleModeParams<T>) -> Result<Vec<ValidityFlag>> {
    let dec = sideband_decomposition(p)?;
    let rates = effective_rates(p, &dec);
    let (wd1, _) = p.drive_frequencies();
    let slowest = p.omega0.min(wd1).min(p.epsilon);
    Ok(vec![
        ValidityFlag::new("gsq_over_gammaq", (rates.gamma_sq.re / p.gamma_q).as_f64(), VALIDITY_THRESHOLD),
        ValidityFlag::new("gammaq_over_freq", (p.gamma_q / slowest).as_f64(), VALIDITY_THRESHOLD),
    ])
}

/// Which steady-state solver to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Gaussian,
    Fock,
    Both,
}

/// Steady state of the single-mode model with its report. With
/// [`Backend::Both`] the Gaussian numbers are reported and the Fock solve
/// is kept as a cross-check (`fock_mismatch`).
#[derive(Clone, Debug, PartialEq)]
pub struct SingleModeResult<T: Real> {
    pub state: GaussianState<T>,
    pub report: SqueezingReport,
    pub pair: BogoliubovPair<T>,
    pub gamma_sq: Complex<T>,
    pub kappa: T,
    /// Top-two-level population of the Fock solve, if one was run.
    pub truncation_population: Option<T>,
    /// Largest relative covariance mismatch Fock vs Gaussian, if both ran.
    pub fock_mismatch: Option<T>,
}

pub fn analyze<T: Real>(p: &SingleModeParams<T>, opts: &BuildOptions, backend: Backend) -> Result<SingleModeResult<T>> {
    let dec = sideband_decomposition(p)?;
    let rates = effective_rates(p, &dec);
    let model = linear_model(p, opts)?;
    let gaussian = match backend {
        Backend::Gaussian | Backend::Both => Some(lyapunov_steady(&model.drift_diffusion()?)?),
        Backend::Fock => None,
    };
    let fock = match backend {
        Backend::Fock | Backend::Both => {
            let spec = model.to_fock(&FockSpace::single_mode(p.fock_dim)?)?;
            let rho = steady_state(&spec)?;
            Some((GaussianState::from_density(&rho)?, rho.truncation_population()))
        }
        Backend::Gaussian => None,
    };
    let fock_mismatch = match (&gaussian, &fock) {
        (Some(g), Some((f, _))) => Some(relative_mismatch(&g.cov, &f.cov)),
        _ => None,
    };
    let truncation_population = fock.as_ref().map(|f| f.1);
    let state = match (gaussian, fock) {
        (Some(g), _) => g,
        (None, Some((f, _))) => f,
        (None, None) => unreachable!("some backend always runs"),
    };
    let mut flags = validity_flags(p)?;
    if let Some(tp) = truncation_population {
        flags.push(ValidityFlag::new("truncation", tp.as_f64(), crate::master::TRUNCATION_TOL));
    }
    let vx = state.var_x(0);
    let report = SqueezingReport {
        var_x: vx.as_f64(),
        var_p: state.var_p(0).as_f64(),
        vacuum_variance: 1.0,
        s_db: squeezing_db(vx, T::one())?.as_f64(),
        occ_bare: vec![state.occupation(0).as_f64()],
        occ_d: occupation_d(&state, &dec.pair, 0, 0)?.as_f64(),
        occ_dbar: None,
        flags,
    };
    Ok(SingleModeResult {
        state,
        report,
        pair: dec.pair,
        gamma_sq: rates.gamma_sq,
        kappa: rates.kappa,
        truncation_population,
        fock_mismatch,
    })
}

/// `max |a − b| / max |a|`.
pub fn relative_mismatch<T: Real>(a: &nalgebra::DMatrix<T>, b: &nalgebra::DMatrix<T>) -> T {
    (a - b).amax() / a.amax()
}

/// `−10·log₁₀((u − v)²)`, the ideal-limit squeezing.
pub fn ideal_db<T: Real>(pair: &BogoliubovPair<T>) -> Result<T> {
    let d = pair.u - pair.v;
    squeezing_db(d * d, T::one())
}
