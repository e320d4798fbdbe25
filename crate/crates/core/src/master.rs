// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

//! Lindblad master equations with complex rates.
//!
//! A term `(O, Γ)` generates
//! `L_{O,Γ}(ρ) = (Γ/2)(OρO† − O†Oρ) + h.c.`
//! which for Hermitian `ρ` equals a standard dissipator of rate `Re Γ` plus
//! the Hamiltonian shift `(Im Γ/2)·O†O`. Everything below uses the second
//! form; [`apply_term_literal`] keeps the first one for cross-checks.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hilbert::{max_abs, FockSpace, Op};
use crate::linalg::{components_containing, rcm_order, sparse_lu_solve, BandLu, Triplets};
use crate::num::{c, cabs, ci, cr, Complex, Real};
use crate::sparse::SparseOp;

type Mat<T> = DMatrix<Complex<T>>;

/// A jump operator with its complex rate.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladTerm<T: Real> {
    op: Op<T>,
    gamma: Complex<T>,
}

impl<T: Real> LindbladTerm<T> {
    /// Rejects `Re Γ < 0`.
    pub fn new(op: Op<T>, gamma: Complex<T>) -> Result<Self> {
        if gamma.re < T::zero() {
            return Err(Error::NegativeRate(gamma.re.as_f64()));
        }
        Ok(Self { op, gamma })
    }

    pub fn op(&self) -> &Op<T> {
        &self.op
    }

    pub fn gamma(&self) -> Complex<T> {
        self.gamma
    }
}

/// `Re Γ·(OρO† − ½{O†O, ρ}) − i·(Im Γ/2)·[O†O, ρ]`.
pub fn apply_term<T: Real>(term: &LindbladTerm<T>, rho: &Mat<T>) -> Result<Mat<T>> {
    let o = term.op.matrix();
    if rho.nrows() != o.nrows() || rho.ncols() != o.ncols() {
        return Err(Error::SpaceMismatch);
    }
    let half = T::lit(0.5);
    let odo = o.adjoint() * o;
    let jump = o * rho * o.adjoint();
    let anti = &odo * rho + rho * &odo;
    let comm = &odo * rho - rho * &odo;
    Ok(jump * cr(term.gamma.re) - anti * cr(term.gamma.re * half) - comm * ci(term.gamma.im * half))
}

/// `(Γ/2)(OρO† − O†Oρ) + h.c.`, evaluated literally.
pub fn apply_term_literal<T: Real>(term: &LindbladTerm<T>, rho: &Mat<T>) -> Result<Mat<T>> {
    let o = term.op.matrix();
    if rho.nrows() != o.nrows() || rho.ncols() != o.ncols() {
        return Err(Error::SpaceMismatch);
    }
    let x = (o * rho * o.adjoint() - o.adjoint() * o * rho) * (term.gamma * cr(T::lit(0.5)));
    Ok(&x + x.adjoint())
}

/// A static generator: Hamiltonian plus complex-rate Lindblad terms.
#[derive(Clone, Debug, PartialEq)]
pub struct LiouvillianSpec<T: Real> {
    hamiltonian: Op<T>,
    terms: Vec<LindbladTerm<T>>,
}

impl<T: Real> LiouvillianSpec<T> {
    pub fn new(hamiltonian: Op<T>, terms: Vec<LindbladTerm<T>>) -> Result<Self> {
        let space = hamiltonian.space();
        if terms.iter().any(|t| t.op.space() != space) {
            return Err(Error::SpaceMismatch);
        }
        let scale = T::one().max(max_abs(hamiltonian.matrix()));
        let herm = hamiltonian.hermiticity_error();
        if herm > T::tol(1e-12) * scale {
            return Err(Error::NonHermitian(herm.as_f64()));
        }
        Ok(Self { hamiltonian, terms })
    }

    /// Zero Hamiltonian.
    pub fn dissipative(space: &FockSpace, terms: Vec<LindbladTerm<T>>) -> Result<Self> {
        Self::new(Op::zeros(space), terms)
    }

    pub fn space(&self) -> &FockSpace {
        self.hamiltonian.space()
    }

    pub fn hamiltonian(&self) -> &Op<T> {
        &self.hamiltonian
    }

    pub fn terms(&self) -> &[LindbladTerm<T>] {
        &self.terms
    }

    pub fn with_term(mut self, term: LindbladTerm<T>) -> Result<Self> {
        if term.op.space() != self.space() {
            return Err(Error::SpaceMismatch);
        }
        self.terms.push(term);
        Ok(self)
    }

    /// Sum of two generators on the same space, each scaled by its weight.
    pub fn weighted_sum(parts: &[(T, &Self)]) -> Result<Self> {
        let first = parts.first().ok_or(Error::InvalidParameter {
            name: "weighted_sum",
            reason: "no generators given".into(),
        })?;
        let mut h = Op::zeros(first.1.space());
        let mut terms = Vec::new();
        for &(w, spec) in parts {
            if w < T::zero() {
                return Err(Error::NegativeRate(w.as_f64()));
            }
            h = h.add(&spec.hamiltonian.scale(cr(w)))?;
            for t in &spec.terms {
                terms.push(LindbladTerm::new(t.op.clone(), t.gamma * cr(w))?);
            }
        }
        Self::new(h, terms)
    }

    /// `dρ/dt` in the matrix-free form.
    pub fn apply(&self, rho: &Mat<T>) -> Result<Mat<T>> {
        let mut out = Mat::zeros(rho.nrows(), rho.ncols());
        Compiled::new(self).rhs(rho, &mut out);
        Ok(out)
    }
}

/// Sparse form of a static generator:
/// `dρ/dt = Kρ + ρK† + Σ_k r_k·O_k ρ O_k†` with `K = −iH_eff`.
#[derive(Clone, Debug)]
pub(crate) struct Compiled<T: Real> {
    k: SparseOp<T>,
    k_dag: SparseOp<T>,
    jumps: Vec<(SparseOp<T>, SparseOp<T>, T)>,
    dim: usize,
}

impl<T: Real> Compiled<T> {
    pub(crate) fn new(spec: &LiouvillianSpec<T>) -> Self {
        let half = T::lit(0.5);
        // −iH − Σ (i Im Γ/2 + Re Γ/2) O†O
        let mut k = spec.hamiltonian.matrix() * ci(-T::one());
        let mut jumps = Vec::new();
        for t in &spec.terms {
            let sp = t.op.to_sparse();
            let sp_dag = sp.adjoint();
            let odo = sp_dag.mul_left(t.op.matrix());
            k -= odo * c(t.gamma.re * half, t.gamma.im * half);
            if t.gamma.re > T::zero() {
                jumps.push((sp, sp_dag, t.gamma.re));
            }
        }
        let k = SparseOp::from_dense(&k);
        Self { k_dag: k.adjoint(), k, jumps, dim: spec.space().dim() }
    }

    pub(crate) fn rhs(&self, rho: &Mat<T>, out: &mut Mat<T>) {
        let one = cr(T::one());
        out.fill(Complex::new(T::zero(), T::zero()));
        self.k.mul_left_acc(rho, one, out);
        self.k_dag.mul_right_acc(rho, one, out);
        for (o, o_dag, r) in &self.jumps {
            let tmp = o.mul_left(rho);
            o_dag.mul_right_acc(&tmp, cr(*r), out);
        }
    }

    /// Column-stacked superoperator entries (unmerged).
    fn triplets(&self) -> Vec<(usize, usize, Complex<T>)> {
        let d = self.dim;
        let mut out = Vec::new();
        // vec(AρB) = (Bᵀ ⊗ A) vec(ρ): entry (i + j d, k + l d) = A_ik B_lj
        for &(i, k, z) in self.k.entries() {
            for j in 0..d {
                out.push((i + j * d, k + j * d, z));
            }
        }
        for &(l, j, z) in self.k_dag.entries() {
            for i in 0..d {
                out.push((i + j * d, i + l * d, z));
            }
        }
        for (o, o_dag, r) in &self.jumps {
            for &(i, k, a) in o.entries() {
                for &(l, j, b) in o_dag.entries() {
                    out.push((i + j * d, k + l * d, a * b * cr(*r)));
                }
            }
        }
        out
    }
}

/// Default cap on `d²` for the dense superoperator.
pub const DENSE_LIOUVILLIAN_CAP: usize = 1 << 14;

/// Dense `d² × d²` superoperator in column-stacking convention, so that
/// `vec(dρ/dt) = L·vec(ρ)`.
pub fn build_liouvillian_matrix<T: Real>(spec: &LiouvillianSpec<T>, cap: usize) -> Result<Mat<T>> {
    let d = spec.space().dim();
    let n = d * d;
    if n > cap {
        return Err(Error::DimensionOverflow { dim: n, cap });
    }
    let mut l = Mat::zeros(n, n);
    for (i, j, z) in Compiled::new(spec).triplets() {
        l[(i, j)] += z;
    }
    Ok(l)
}

/// Sparse superoperator, duplicates merged.
pub fn build_liouvillian_sparse<T: Real>(spec: &LiouvillianSpec<T>) -> Triplets<T> {
    let d = spec.space().dim();
    Triplets::from_unmerged(d * d, Compiled::new(spec).triplets())
}

pub fn vectorize<T: Real>(rho: &Mat<T>) -> DVector<Complex<T>> {
    DVector::from_column_slice(rho.as_slice())
}

pub fn unvectorize<T: Real>(v: &DVector<Complex<T>>, d: usize) -> Mat<T> {
    Mat::from_column_slice(d, d, v.as_slice())
}

/// Tolerances for [`DensityMatrix`] validation.
pub const TRACE_TOL: f64 = 1e-10;
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;
/// Truncation adequacy: population of the top two Fock levels of any mode.
pub const TRUNCATION_TOL: f64 = 1e-8;

/// A density matrix on a [`FockSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    space: FockSpace,
    rho: Mat<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates trace, Hermiticity and positivity.
    pub fn new(space: &FockSpace, rho: Mat<T>) -> Result<Self> {
        let dm = Self::unchecked(space, rho)?;
        dm.check_invariants()?;
        Ok(dm)
    }

    pub(crate) fn unchecked(space: &FockSpace, rho: Mat<T>) -> Result<Self> {
        if rho.nrows() != space.dim() || rho.ncols() != space.dim() {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self { space: space.clone(), rho })
    }

    pub fn from_pure(space: &FockSpace, psi: &DVector<Complex<T>>) -> Result<Self> {
        if psi.len() != space.dim() {
            return Err(Error::SpaceMismatch);
        }
        let psi = psi / cr(psi.norm());
        Self::new(space, &psi * psi.adjoint())
    }

    /// Qubit ground state and vacuum in every mode.
    pub fn ground(space: &FockSpace) -> Self {
        let mut rho = Mat::zeros(space.dim(), space.dim());
        rho[(0, 0)] = cr(T::one());
        Self { space: space.clone(), rho }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.rho
    }

    pub fn into_matrix(self) -> Mat<T> {
        self.rho
    }

    pub fn trace(&self) -> Complex<T> {
        self.rho.trace()
    }

    pub fn hermiticity_error(&self) -> T {
        max_abs(&(&self.rho - self.rho.adjoint()))
    }

    pub fn eigenvalues(&self) -> DVector<T> {
        let h = (&self.rho + self.rho.adjoint()) * cr(T::lit(0.5));
        SymmetricEigen::new(h).eigenvalues
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues().iter().fold(T::max_value().unwrap_or_else(T::one), |m, &x| m.min(x))
    }

    pub fn purity(&self) -> T {
        (&self.rho * &self.rho).trace().re
    }

    pub fn check_invariants(&self) -> Result<()> {
        let tr = cabs(self.trace() - cr(T::one()));
        if tr > T::tol(TRACE_TOL) {
            return Err(Error::Invariant { what: "|tr(rho) - 1|", value: tr.as_f64(), threshold: TRACE_TOL });
        }
        let herm = self.hermiticity_error();
        if herm > T::tol(HERMITICITY_TOL) {
            return Err(Error::Invariant { what: "|rho - rho^dag|", value: herm.as_f64(), threshold: HERMITICITY_TOL });
        }
        // a Cholesky factor of ρ + tol·I certifies the bound without a full
        // eigendecomposition
        let shifted = &self.rho + Mat::<T>::identity(self.rho.nrows(), self.rho.ncols()) * cr(T::tol(POSITIVITY_TOL));
        if nalgebra::Cholesky::new(shifted).is_some() {
            return Ok(());
        }
        let min = self.min_eigenvalue();
        if min < -T::tol(POSITIVITY_TOL) {
            return Err(Error::Invariant { what: "min eigenvalue", value: min.as_f64(), threshold: -POSITIVITY_TOL });
        }
        Ok(())
    }

    pub fn expectation(&self, op: &Op<T>) -> Result<Complex<T>> {
        if op.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(trace_product(op.matrix(), &self.rho))
    }

    /// `<ψ|ρ|ψ>`.
    pub fn fidelity_pure(&self, psi: &DVector<Complex<T>>) -> Result<T> {
        if psi.len() != self.space.dim() {
            return Err(Error::SpaceMismatch);
        }
        Ok((psi.adjoint() * &self.rho * psi)[(0, 0)].re / psi.norm_squared())
    }

    /// `½ Σ |λ(ρ − σ)|`.
    pub fn trace_distance(&self, other: &Self) -> Result<T> {
        if other.space != self.space {
            return Err(Error::SpaceMismatch);
        }
        let diff = &self.rho - &other.rho;
        let h = (&diff + diff.adjoint()) * cr(T::lit(0.5));
        let eig = SymmetricEigen::new(h).eigenvalues;
        Ok(eig.iter().fold(T::zero(), |s, &x| s + x.abs()) * T::lit(0.5))
    }

    /// Population of the qubit's excited level.
    pub fn qubit_excited_population(&self) -> Result<T> {
        if !self.space.has_qubit() {
            return Err(Error::NoQubit);
        }
        let half = self.space.dim() / 2;
        Ok((half..self.space.dim()).fold(T::zero(), |s, i| s + self.rho[(i, i)].re))
    }

    /// Reduced state of the modes after tracing out the qubit.
    pub fn trace_out_qubit(&self) -> Result<Self> {
        if !self.space.has_qubit() {
            return Err(Error::NoQubit);
        }
        let space = FockSpace::new(self.space.mode_dims().to_vec(), false)?;
        let m = space.dim();
        let rho = Mat::from_fn(m, m, |i, j| self.rho[(i, j)] + self.rho[(i + m, j + m)]);
        Ok(Self { space, rho })
    }

    /// Population in the top two Fock levels of `mode`.
    pub fn top_levels_population(&self, mode: usize) -> Result<T> {
        let dims = self.space.mode_dims();
        let d = *dims.get(mode).ok_or(Error::ModeOutOfRange { index: mode, modes: dims.len() })?;
        let mut p = T::zero();
        for i in 0..self.space.dim() {
            let (_, occ) = self.space.decompose(i);
            if occ[mode] + 2 >= d {
                p += self.rho[(i, i)].re;
            }
        }
        Ok(p)
    }

    /// Largest top-two-level population over all modes.
    pub fn truncation_population(&self) -> T {
        (0..self.space.n_modes())
            .filter_map(|m| self.top_levels_population(m).ok())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn truncation_adequate(&self) -> bool {
        self.truncation_population() < T::tol(TRUNCATION_TOL)
    }

    /// Re-Hermitizes and renormalizes; returns the sizes of the two
    /// corrections.
    fn polish(&mut self) -> (T, T) {
        let herm = self.hermiticity_error();
        self.rho = (&self.rho + self.rho.adjoint()) * cr(T::lit(0.5));
        let tr = self.rho.trace().re;
        self.rho /= cr(tr);
        (herm, (tr - T::one()).abs())
    }
}

/// `tr(A·B)` without forming the product.
pub(crate) fn trace_product<T: Real>(a: &Mat<T>, b: &Mat<T>) -> Complex<T> {
    let mut s = Complex::new(T::zero(), T::zero());
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s
}

/// Integrator controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions<T: Real> {
    /// Absolute and relative local tolerance.
    pub tol: T,
    pub max_step: Option<T>,
    pub initial_step: Option<T>,
}

impl<T: Real> Default for EvolveOptions<T> {
    fn default() -> Self {
        Self { tol: T::tol(1e-9), max_step: None, initial_step: None }
    }
}

impl<T: Real> EvolveOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Threshold on the Hermiticity and trace corrections applied at output.
pub const OUTPUT_CORRECTION_TOL: f64 = 1e-8;

/// Time-dependent coefficient `c(t)`.
pub type Coefficient<T> = Arc<dyn Fn(T) -> Complex<T> + Send + Sync>;

/// Factory for generators evaluated at arbitrary times.
pub type SpecHook<T> = Arc<dyn Fn(T) -> Result<LiouvillianSpec<T>> + Send + Sync>;

/// A drive `c(t)·X + c̄(t)·X†` added to a static Hamiltonian.
#[derive(Clone)]
pub struct Drive<T: Real> {
    pub op: Op<T>,
    pub coeff: Coefficient<T>,
}

/// Generators with explicit time dependence.
#[derive(Clone)]
pub enum TimeDependentSpec<T: Real> {
    /// `H(t) = H₀ + Σ_k (c_k(t) X_k + h.c.)` with static dissipators.
    Modulated { base: LiouvillianSpec<T>, drives: Vec<Drive<T>> },
    /// Static generators applied for the given durations, repeated
    /// cyclically from `t = 0`. Switching times are integration breakpoints.
    Piecewise { segments: Vec<(T, LiouvillianSpec<T>)> },
    /// Arbitrary generator rebuilt at every stage time (slow, general).
    Hook(SpecHook<T>),
}

impl<T: Real> std::fmt::Debug for TimeDependentSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Modulated { drives, .. } => write!(f, "Modulated({} drives)", drives.len()),
            Self::Piecewise { segments } => write!(f, "Piecewise({} segments)", segments.len()),
            Self::Hook(_) => write!(f, "Hook"),
        }
    }
}

impl<T: Real> TimeDependentSpec<T> {
    pub fn space(&self) -> Option<&FockSpace> {
        match self {
            Self::Modulated { base, .. } => Some(base.space()),
            Self::Piecewise { segments } => segments.first().map(|s| s.1.space()),
            Self::Hook(_) => None,
        }
    }
}

/// Right-hand side evaluator used by the integrator.
trait Rhs<T: Real> {
    fn eval(&self, t: T, rho: &Mat<T>, out: &mut Mat<T>) -> Result<()>;
}

impl<T: Real> Rhs<T> for Compiled<T> {
    fn eval(&self, _t: T, rho: &Mat<T>, out: &mut Mat<T>) -> Result<()> {
        self.rhs(rho, out);
        Ok(())
    }
}

struct ModulatedRhs<T: Real> {
    base: Compiled<T>,
    drives: Vec<(SparseOp<T>, SparseOp<T>, Coefficient<T>)>,
}

impl<T: Real> Rhs<T> for ModulatedRhs<T> {
    fn eval(&self, t: T, rho: &Mat<T>, out: &mut Mat<T>) -> Result<()> {
        self.base.rhs(rho, out);
        let i = ci(T::one());
        for (x, x_dag, coeff) in &self.drives {
            let z = coeff(t);
            // −i[zX + z̄X†, ρ]
            x.mul_left_acc(rho, -i * z, out);
            x_dag.mul_left_acc(rho, -i * z.conj(), out);
            x.mul_right_acc(rho, i * z, out);
            x_dag.mul_right_acc(rho, i * z.conj(), out);
        }
        Ok(())
    }
}

struct HookRhs<T: Real>(SpecHook<T>);

impl<T: Real> Rhs<T> for HookRhs<T> {
    fn eval(&self, t: T, rho: &Mat<T>, out: &mut Mat<T>) -> Result<()> {
        let spec = (self.0)(t)?;
        if spec.space().dim() != rho.nrows() {
            return Err(Error::SpaceMismatch);
        }
        Compiled::new(&spec).rhs(rho, out);
        Ok(())
    }
}

/// Counters reported by an integration.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive integrator state carried across output times.
struct Stepper<'a, T: Real> {
    rhs: &'a dyn Rhs<T>,
    opts: EvolveOptions<T>,
    h: Option<T>,
    err_prev: T,
    stats: IntegrationStats,
}

impl<'a, T: Real> Stepper<'a, T> {
    fn new(rhs: &'a dyn Rhs<T>, opts: EvolveOptions<T>) -> Self {
        Self { rhs, opts, h: opts.initial_step, err_prev: T::lit(1e-4), stats: IntegrationStats::default() }
    }

    fn initial_step(&mut self, t: T, y: &Mat<T>, f0: &Mat<T>) -> T {
        let d0 = max_abs(y);
        let d1 = max_abs(f0);
        let guess = if d1 > T::lit(1e-300) { T::lit(0.01) * d0.max(T::lit(1e-5)) / d1 } else { T::lit(1e-6) };
        let _ = t;
        guess
    }

    /// Advances `y` from `t0` to `t1` exactly.
    fn advance(&mut self, y: &mut Mat<T>, t0: T, t1: T) -> Result<()> {
        if t1 <= t0 {
            return Ok(());
        }
        let (n, m) = y.shape();
        let zero = || Mat::<T>::zeros(n, m);
        let mut k: Vec<Mat<T>> = (0..7).map(|_| zero()).collect();
        let mut stage = zero();
        let mut y_new = zero();
        let mut t = t0;
        self.rhs.eval(t, y, &mut k[0])?;
        self.stats.rhs_evals += 1;
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(t, y, &k[0]),
        };
        if let Some(hmax) = self.opts.max_step {
            h = h.min(hmax);
        }
        let tol = self.opts.tol;
        let one = T::one();
        loop {
            let remaining = t1 - t;
            let last = h >= remaining;
            let h_step = if last { remaining } else { h };
            let floor = T::lit(1e-14) * t.abs().max(one);
            if h_step < floor && !last {
                return Err(Error::StepUnderflow { t: t.as_f64(), h: h_step.as_f64() });
            }
            for s in 0..6 {
                stage.copy_from(y);
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    let a = A[s][j];
                    if a != 0.0 {
                        let w = h_step * T::lit(a);
                        for (st, &kv) in stage.as_mut_slice().iter_mut().zip(kj.as_slice()) {
                            *st += kv * w;
                        }
                    }
                }
                let (ks, rest) = k.split_at_mut(s + 1);
                let _ = ks;
                self.rhs.eval(t + h_step * T::lit(C[s]), &stage, &mut rest[0])?;
                self.stats.rhs_evals += 1;
                if s == 5 {
                    y_new.copy_from(&stage);
                }
            }
            // error estimate from the embedded pair
            let mut err_sq = T::zero();
            let mut count = 0usize;
            for idx in 0..n * m {
                let mut e = Complex::new(T::zero(), T::zero());
                for (j, kj) in k.iter().enumerate() {
                    if E[j] != 0.0 {
                        e += kj[idx] * cr(T::lit(E[j]));
                    }
                }
                let e = cabs(e) * h_step;
                let scale = tol + tol * cabs(y[idx]).max(cabs(y_new[idx]));
                let r = e / scale;
                err_sq += r * r;
                count += 1;
            }
            let err = (err_sq / T::from_usize(count).unwrap()).sqrt();
            if err <= one {
                self.stats.accepted += 1;
                t = if last { t1 } else { t + h_step };
                std::mem::swap(y, &mut y_new);
                k.swap(0, 6);
                let err_c = err.max(T::lit(1e-10));
                let fac = T::lit(0.9) * err_c.powf(T::lit(-0.7 / 5.0)) * self.err_prev.powf(T::lit(0.4 / 5.0));
                let fac = fac.max(T::lit(0.2)).min(T::lit(5.0));
                self.err_prev = err_c;
                if !last {
                    h = h_step * fac;
                }
                if let Some(hmax) = self.opts.max_step {
                    h = h.min(hmax);
                }
                if last {
                    self.h = Some(h);
                    return Ok(());
                }
            } else {
                self.stats.rejected += 1;
                let fac = (T::lit(0.9) * err.powf(T::lit(-0.2))).max(T::lit(0.1));
                h = h_step * fac;
                if h < floor {
                    return Err(Error::StepUnderflow { t: t.as_f64(), h: h.as_f64() });
                }
            }
        }
    }
}

fn finish<T: Real>(space: &FockSpace, rho: Mat<T>) -> Result<DensityMatrix<T>> {
    let mut dm = DensityMatrix::unchecked(space, rho)?;
    let (herm, tr) = dm.polish();
    let thr = T::tol(OUTPUT_CORRECTION_TOL);
    if herm > thr {
        return Err(Error::Invariant { what: "hermiticity correction", value: herm.as_f64(), threshold: OUTPUT_CORRECTION_TOL });
    }
    if tr > thr {
        return Err(Error::Invariant { what: "trace correction", value: tr.as_f64(), threshold: OUTPUT_CORRECTION_TOL });
    }
    let min = dm.min_eigenvalue();
    if min < -T::tol(POSITIVITY_TOL) {
        return Err(Error::Invariant { what: "min eigenvalue", value: min.as_f64(), threshold: -POSITIVITY_TOL });
    }
    Ok(dm)
}

fn check_space<T: Real>(rho0: &DensityMatrix<T>, space: &FockSpace) -> Result<()> {
    if rho0.space() != space {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

/// `ρ(t_final)` under a static generator.
pub fn evolve<T: Real>(
    rho0: &DensityMatrix<T>,
    spec: &LiouvillianSpec<T>,
    t_final: T,
    opts: &EvolveOptions<T>,
) -> Result<DensityMatrix<T>> {
    let mut out = None;
    evolve_sampled(rho0, spec, &[t_final], opts, |_, rho| {
        out = Some(rho.clone());
        Ok(())
    })?;
    Ok(out.expect("one sample"))
}

/// Integrates a static generator, calling `observe` at every time in
/// `times` (ascending, starting at or after 0).
pub fn evolve_sampled<T: Real, F>(
    rho0: &DensityMatrix<T>,
    spec: &LiouvillianSpec<T>,
    times: &[T],
    opts: &EvolveOptions<T>,
    observe: F,
) -> Result<IntegrationStats>
where
    F: FnMut(T, &DensityMatrix<T>) -> Result<()>,
{
    check_space(rho0, spec.space())?;
    let compiled = Compiled::new(spec);
    run_sampled(&compiled, rho0, times, opts, observe)
}

fn run_sampled<T: Real, F>(
    rhs: &dyn Rhs<T>,
    rho0: &DensityMatrix<T>,
    times: &[T],
    opts: &EvolveOptions<T>,
    mut observe: F,
) -> Result<IntegrationStats>
where
    F: FnMut(T, &DensityMatrix<T>) -> Result<()>,
{
    let space = rho0.space().clone();
    let mut stepper = Stepper::new(rhs, *opts);
    let mut y = rho0.matrix().clone();
    let mut t = T::zero();
    for &ts in times {
        if ts < t {
            return Err(Error::InvalidParameter { name: "times", reason: "sample times must ascend from 0".into() });
        }
        stepper.advance(&mut y, t, ts)?;
        t = ts;
        let dm = finish(&space, y)?;
        observe(t, &dm)?;
        y = dm.into_matrix();
    }
    Ok(stepper.stats)
}

/// `ρ(t_final)` under an explicitly time-dependent generator.
pub fn evolve_timedep<T: Real>(
    rho0: &DensityMatrix<T>,
    spec: &TimeDependentSpec<T>,
    t_final: T,
    opts: &EvolveOptions<T>,
) -> Result<DensityMatrix<T>> {
    let mut out = None;
    evolve_timedep_sampled(rho0, spec, &[t_final], opts, |_, rho| {
        out = Some(rho.clone());
        Ok(())
    })?;
    Ok(out.expect("one sample"))
}

pub fn evolve_timedep_sampled<T: Real, F>(
    rho0: &DensityMatrix<T>,
    spec: &TimeDependentSpec<T>,
    times: &[T],
    opts: &EvolveOptions<T>,
    mut observe: F,
) -> Result<IntegrationStats>
where
    F: FnMut(T, &DensityMatrix<T>) -> Result<()>,
{
    if let Some(space) = spec.space() {
        check_space(rho0, space)?;
    }
    match spec {
        TimeDependentSpec::Modulated { base, drives } => {
            let mut ds = Vec::with_capacity(drives.len());
            for d in drives {
                if d.op.space() != base.space() {
                    return Err(Error::SpaceMismatch);
                }
                let sp = d.op.to_sparse();
                ds.push((sp.clone(), sp.adjoint(), d.coeff.clone()));
            }
            let rhs = ModulatedRhs { base: Compiled::new(base), drives: ds };
            run_sampled(&rhs, rho0, times, opts, observe)
        }
        TimeDependentSpec::Hook(hook) => run_sampled(&HookRhs(hook.clone()), rho0, times, opts, observe),
        TimeDependentSpec::Piecewise { segments } => {
            if segments.is_empty() {
                return Err(Error::InvalidParameter { name: "segments", reason: "empty".into() });
            }
            if segments.iter().any(|(dt, _)| *dt <= T::zero()) {
                return Err(Error::InvalidParameter { name: "segments", reason: "durations must be positive".into() });
            }
            let compiled: Vec<Compiled<T>> = segments.iter().map(|(_, s)| Compiled::new(s)).collect();
            let space = rho0.space().clone();
            let mut stats = IntegrationStats::default();
            let mut y = rho0.matrix().clone();
            let (mut t, mut seg, mut seg_end) = (T::zero(), 0usize, segments[0].0);
            for &ts in times {
                while t < ts {
                    let stop = seg_end.min(ts);
                    let mut st = Stepper::new(&compiled[seg], *opts);
                    st.advance(&mut y, t, stop)?;
                    stats.accepted += st.stats.accepted;
                    stats.rejected += st.stats.rejected;
                    stats.rhs_evals += st.stats.rhs_evals;
                    t = stop;
                    if t >= seg_end {
                        seg = (seg + 1) % segments.len();
                        seg_end += segments[seg].0;
                    }
                }
                let dm = finish(&space, y)?;
                observe(t, &dm)?;
                y = dm.into_matrix();
            }
            Ok(stats)
        }
    }
}

/// Steady-state solver controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyStateOptions {
    /// Bound on the number of unknowns after component reduction.
    pub max_unknowns: usize,
    /// Residual bound on the trace-normalized solution, relative to the
    /// largest superoperator entry.
    pub residual_tol: f64,
    /// Pivot ratio below which the steady state is declared degenerate.
    pub min_pivot_ratio: f64,
    /// Reduced systems up to this size also get an eigenvalue gap check.
    pub gap_check_below: usize,
    /// Required ratio of the second-smallest |eigenvalue| to the spectral
    /// scale.
    pub min_gap_ratio: f64,
    /// Reduced systems larger than this use the fill-reducing sparse LU
    /// (in `f64`) instead of the banded one, when `T` is no more precise
    /// than `f64`.
    pub sparse_lu_above: usize,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        Self {
            max_unknowns: 1 << 20,
            residual_tol: 1e-10,
            min_pivot_ratio: 1e-13,
            gap_check_below: 256,
            min_gap_ratio: 1e-8,
            sparse_lu_above: 2000,
        }
    }
}

/// Steady state with solver diagnostics.
#[derive(Clone, Debug)]
pub struct SteadySolution<T: Real> {
    pub rho: DensityMatrix<T>,
    pub residual: T,
    /// Banded path: smallest over largest pivot. Sparse path: the inverse
    /// condition proxy of [`crate::linalg::sparse_lu_solve`].
    pub pivot_ratio: T,
    pub unknowns: usize,
    /// Second-smallest |eigenvalue| over the largest, when computed.
    pub gap_ratio: Option<T>,
}

pub fn steady_state<T: Real>(spec: &LiouvillianSpec<T>) -> Result<DensityMatrix<T>> {
    Ok(steady_state_with(spec, &SteadyStateOptions::default())?.rho)
}

/// Solves `L vec(ρ) = 0` with `tr ρ = 1`.
///
/// Only the connected components of the superoperator graph that touch
/// populations are kept (the others carry no trace and vanish in a unique
/// steady state). Within them the equation of one population is replaced
/// by pinning that population, the system is solved (banded LU after
/// reverse Cuthill–McKee, or sparse LU when large), and the result is
/// renormalized. Trace preservation makes the dropped equation
/// redundant, so this is equivalent to the trace-row replacement.
pub fn steady_state_with<T: Real>(spec: &LiouvillianSpec<T>, opts: &SteadyStateOptions) -> Result<SteadySolution<T>> {
    let d = spec.space().dim();
    let mut l = build_liouvillian_sparse(spec);
    let scale = l.max_abs();
    if scale == T::zero() {
        return Err(Error::DegenerateSteadyState(0.0));
    }
    for e in l.entries.iter_mut() {
        e.2 /= cr(scale);
    }
    let diag: Vec<usize> = (0..d).map(|i| i + i * d).collect();
    let keep = components_containing(&l, &diag);
    let n = keep.len();
    if n > opts.max_unknowns {
        return Err(Error::DimensionOverflow { dim: n, cap: opts.max_unknowns });
    }
    let mut local = vec![usize::MAX; d * d];
    for (k, &g) in keep.iter().enumerate() {
        local[g] = k;
    }
    let reduced: Vec<_> = l
        .entries
        .iter()
        .filter(|e| local[e.0] != usize::MAX)
        .map(|&(i, j, z)| (local[i], local[j], z))
        .collect();
    let edges: Vec<_> = reduced.iter().map(|&(i, j, _)| (i, j)).collect();
    let perm = rcm_order(n, &edges);
    let mut inv = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }

    let gap_ratio = if n <= opts.gap_check_below { Some(gap_ratio(n, &reduced)?) } else { None };
    if let Some(g) = gap_ratio {
        if g < T::lit(opts.min_gap_ratio) {
            return Err(Error::DegenerateSteadyState(g.as_f64()));
        }
    }

    let use_sparse = n > opts.sparse_lu_above && T::default_epsilon().as_f64() >= f64::EPSILON;
    let solve_pinned = |pin_global: usize| -> (Vec<Complex<T>>, T) {
        let pin = inv[local[pin_global]];
        let mut entries: Vec<_> = reduced
            .iter()
            .map(|&(i, j, z)| (inv[i], inv[j], z))
            .filter(|&(i, _, _)| i != pin)
            .collect();
        entries.push((pin, pin, cr(T::one())));
        let a = Triplets::from_unmerged(n, entries);
        let mut b = vec![Complex::new(T::zero(), T::zero()); n];
        b[pin] = cr(T::one());
        if use_sparse {
            return sparse_lu_solve(&a, &b).unwrap_or_else(|| (vec![Complex::new(T::zero(), T::zero()); n], T::zero()));
        }
        let lu = BandLu::factor(&a);
        (lu.solve(&b), lu.pivot_ratio())
    };

    // pin the vacuum population first; retry on the largest one if it is
    // (nearly) empty in the solution
    let (mut x, mut ratio) = solve_pinned(diag[0]);
    let pops = |x: &[Complex<T>]| -> Vec<T> { diag.iter().map(|&g| x[inv[local[g]]].re).collect() };
    let p = pops(&x);
    let tr = p.iter().fold(T::zero(), |s, &v| s + v);
    if !(tr.abs() > T::zero()) || T::one() / tr.abs() < T::lit(1e-6) {
        let (best, _) = p
            .iter()
            .enumerate()
            .fold((0, T::zero()), |(bi, bv), (i, &v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
        let retry = solve_pinned(diag[best]);
        x = retry.0;
        ratio = retry.1;
    }
    if ratio < T::lit(opts.min_pivot_ratio) {
        return Err(Error::DegenerateSteadyState(ratio.as_f64()));
    }

    let mut full = vec![Complex::new(T::zero(), T::zero()); d * d];
    for (k, &g) in keep.iter().enumerate() {
        full[g] = x[inv[k]];
    }
    let tr = diag.iter().fold(Complex::new(T::zero(), T::zero()), |s, &g| s + full[g]);
    for z in full.iter_mut() {
        *z /= tr;
    }
    let r = l.mul_vec(&full);
    let residual = r.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt();
    if residual > T::tol(opts.residual_tol) {
        return Err(Error::NoConvergence(residual.as_f64()));
    }
    let rho = Mat::from_column_slice(d, d, &full);
    let mut dm = DensityMatrix::unchecked(spec.space(), rho)?;
    dm.polish();
    dm.check_invariants()?;
    Ok(SteadySolution { rho: dm, residual, pivot_ratio: ratio, unknowns: n, gap_ratio })
}

/// Second-smallest |eigenvalue| over the largest for a small dense block.
fn gap_ratio<T: Real>(n: usize, entries: &[(usize, usize, Complex<T>)]) -> Result<T> {
    let mut m = Mat::zeros(n, n);
    for &(i, j, z) in entries {
        m[(i, j)] += z;
    }
    let eig = nalgebra::Schur::new(m).eigenvalues().ok_or(Error::NoConvergence(f64::NAN))?;
    let mut mags: Vec<T> = eig.iter().map(|&z| cabs(z)).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let top = *mags.last().unwrap_or(&T::one());
    if mags.len() < 2 || top == T::zero() {
        return Ok(T::one());
    }
    Ok(mags[1] / top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bogoliubov::BogoliubovPair;
    use crate::hilbert::{bogoliubov_op, create, destroy, number, qubit_lower, qubit_z, squeezed_vacuum, SqueezeKind};

    fn decay_spec(gamma: f64) -> LiouvillianSpec<f64> {
        let s = FockSpace::qubit_only();
        let sm = qubit_lower::<f64>(&s).unwrap();
        LiouvillianSpec::dissipative(&s, vec![LindbladTerm::new(sm, cr(gamma)).unwrap()]).unwrap()
    }

    fn excited_qubit() -> DensityMatrix<f64> {
        let s = FockSpace::qubit_only();
        let mut rho = Mat::zeros(2, 2);
        rho[(1, 1)] = cr(1.0);
        DensityMatrix::new(&s, rho).unwrap()
    }

    #[test]
    fn single_photon_decay() {
        let s = FockSpace::single_mode(3).unwrap();
        let a = destroy::<f64>(&s, 0).unwrap();
        let term = LindbladTerm::new(a, cr(0.7)).unwrap();
        let mut rho = Mat::zeros(3, 3);
        rho[(1, 1)] = cr(1.0);
        let out = apply_term(&term, &rho).unwrap();
        let mut expect = Mat::zeros(3, 3);
        expect[(0, 0)] = cr(0.7);
        expect[(1, 1)] = cr(-0.7);
        assert!(max_abs(&(out - expect)) < 1e-14);
    }

    #[test]
    fn imaginary_rate_is_a_commutator() {
        let s = FockSpace::single_mode(4).unwrap();
        let a = destroy::<f64>(&s, 0).unwrap();
        let d = a.add(&create(&s, 0).unwrap().scale(cr(0.4))).unwrap();
        let term = LindbladTerm::new(d, c(0.0, 1.3)).unwrap();
        let psi = DVector::from_fn(4, |i, _| c(1.0 / (i as f64 + 1.0), 0.3 * i as f64));
        let psi = &psi / cr(psi.norm());
        let rho = &psi * psi.adjoint();
        let dr = apply_term(&term, &rho).unwrap();
        assert!(cabs(dr.trace()) < 1e-14);
        // d tr(ρ²)/dt = 2 tr(ρ dρ)
        assert!(cabs(trace_product(&rho, &dr)) < 1e-14);
    }

    #[test]
    fn negative_rate_rejected() {
        let s = FockSpace::single_mode(2).unwrap();
        let a = destroy::<f64>(&s, 0).unwrap();
        assert_eq!(LindbladTerm::new(a, c(-1e-3, 0.0)).unwrap_err(), Error::NegativeRate(-1e-3));
    }

    #[test]
    fn non_hermitian_hamiltonian_rejected() {
        let s = FockSpace::single_mode(3).unwrap();
        let a = destroy::<f64>(&s, 0).unwrap();
        assert!(matches!(LiouvillianSpec::new(a, vec![]), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn empty_spec_gives_zero_superoperator() {
        let s = FockSpace::single_mode(3).unwrap();
        let spec = LiouvillianSpec::<f64>::dissipative(&s, vec![]).unwrap();
        let l = build_liouvillian_matrix(&spec, DENSE_LIOUVILLIAN_CAP).unwrap();
        assert_eq!(l, Mat::zeros(9, 9));
    }

    #[test]
    fn decay_superoperator_spectrum() {
        let l = build_liouvillian_matrix(&decay_spec(0.8), DENSE_LIOUVILLIAN_CAP).unwrap();
        let eig = nalgebra::Schur::new(l).eigenvalues().unwrap();
        let mut re: Vec<f64> = eig.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in re.iter().zip([-0.8, -0.4, -0.4, 0.0]) {
            assert!((got - want).abs() < 1e-12, "{re:?}");
        }
        assert!(eig.iter().all(|z| z.im.abs() < 1e-12));
    }

    #[test]
    fn dimension_cap_enforced() {
        let s = FockSpace::single_mode(20).unwrap();
        let spec = LiouvillianSpec::<f64>::dissipative(&s, vec![]).unwrap();
        assert_eq!(
            build_liouvillian_matrix(&spec, 100).unwrap_err(),
            Error::DimensionOverflow { dim: 400, cap: 100 }
        );
    }

    #[test]
    fn evolve_zero_spec_is_identity() {
        let s = FockSpace::single_mode(3).unwrap();
        let spec = LiouvillianSpec::<f64>::dissipative(&s, vec![]).unwrap();
        let psi = DVector::from_vec(vec![cr(0.6), c(0.0, 0.8), cr(0.0)]);
        let rho0 = DensityMatrix::from_pure(&s, &psi).unwrap();
        let rho = evolve(&rho0, &spec, 5.0, &EvolveOptions::default()).unwrap();
        assert!(max_abs(&(rho.matrix() - rho0.matrix())) < 1e-14);
    }

    #[test]
    fn qubit_decay_is_exponential() {
        let spec = decay_spec(0.5);
        let opts = EvolveOptions::default();
        let mut worst: f64 = 0.0;
        evolve_sampled(&excited_qubit(), &spec, &[0.5, 1.0, 2.0, 4.0, 8.0], &opts, |t, rho| {
            worst = worst.max((rho.matrix()[(1, 1)].re - (-0.5 * t).exp()).abs());
            Ok(())
        })
        .unwrap();
        assert!(worst < 1e-8, "max error {worst}");
    }

    #[test]
    fn steady_state_of_decay_is_ground() {
        let rho = steady_state(&decay_spec(1.0)).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn steady_state_thermal_competition() {
        let s = FockSpace::single_mode(60).unwrap();
        let a = destroy::<f64>(&s, 0).unwrap();
        let (g1, g2) = (1.0, 0.2);
        let spec = LiouvillianSpec::dissipative(
            &s,
            vec![LindbladTerm::new(a.clone(), cr(g1)).unwrap(), LindbladTerm::new(a.adjoint(), cr(g2)).unwrap()],
        )
        .unwrap();
        let rho = steady_state(&spec).unwrap();
        let n = rho.expectation(&number(&s, 0).unwrap()).unwrap().re;
        assert!((n - g2 / (g1 - g2)).abs() < 1e-9, "n = {n}");
    }

    #[test]
    fn steady_state_of_squeezing_dissipator_is_squeezed_vacuum() {
        let s = FockSpace::single_mode(90).unwrap();
        let pair = BogoliubovPair::new(1.25, 0.75, 0.16).unwrap();
        let d = bogoliubov_op(&s, &pair, 0, 0).unwrap();
        let spec = LiouvillianSpec::dissipative(&s, vec![LindbladTerm::new(d, cr(0.4)).unwrap()]).unwrap();
        let rho = steady_state(&spec).unwrap();
        let psi = squeezed_vacuum(&s, pair.r(), SqueezeKind::Single { mode: 0 }, 1e-10).unwrap();
        let f = rho.fidelity_pure(&psi).unwrap();
        assert!(f > 1.0 - 1e-8, "fidelity {f}");
    }

    #[test]
    fn degenerate_steady_state_detected() {
        // pure dephasing leaves every population invariant
        let s = FockSpace::qubit_only();
        let z = qubit_z::<f64>(&s).unwrap();
        let spec = LiouvillianSpec::dissipative(&s, vec![LindbladTerm::new(z, cr(1.0)).unwrap()]).unwrap();
        assert!(matches!(steady_state(&spec), Err(Error::DegenerateSteadyState(_))));
    }

    #[test]
    fn timedep_constant_hook_matches_static() {
        let spec = decay_spec(0.3);
        let s2 = spec.clone();
        let hook: SpecHook<f64> = Arc::new(move |_| Ok(s2.clone()));
        let opts = EvolveOptions::default();
        let a = evolve(&excited_qubit(), &spec, 3.0, &opts).unwrap();
        let b = evolve_timedep(&excited_qubit(), &TimeDependentSpec::Hook(hook), 3.0, &opts).unwrap();
        assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-9);
    }

    #[test]
    fn modulated_sigma_z_phase() {
        // H(t) = f(t) σ_z with f = cos t, written as c X + h.c. with X = σ_z/2
        let s = FockSpace::qubit_only();
        let z = qubit_z::<f64>(&s).unwrap();
        let base = LiouvillianSpec::dissipative(&s, vec![]).unwrap();
        let drive = Drive { op: z.scale(cr(0.5)), coeff: Arc::new(|t: f64| cr(t.cos())) };
        let spec = TimeDependentSpec::Modulated { base, drives: vec![drive] };
        let psi = DVector::from_vec(vec![cr(0.6), cr(0.8)]);
        let rho0 = DensityMatrix::from_pure(&s, &psi).unwrap();
        let t = 2.5;
        let rho = evolve_timedep(&rho0, &spec, t, &EvolveOptions::default()).unwrap();
        // ρ_10(t) = ρ_10(0)·exp(−2i∫f)
        let want = rho0.matrix()[(1, 0)] * crate::num::cis(-2.0 * t.sin());
        assert!(cabs(rho.matrix()[(1, 0)] - want) < 1e-8);
        assert!((rho.matrix()[(1, 1)].re - 0.64).abs() < 1e-12);
    }
}
