// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

//! Covariance-matrix backend for generators with linear jumps and at most
//! quadratic Hamiltonians.
//!
//! Quadratures are `x_i = a_i + a_i†`, `p_i = −i(a_i − a_i†)`, ordered
//! `R = (x_1, p_1, x_2, p_2, …)`, so `[R_i, R_j] = 2iΩ_ij` and the vacuum
//! covariance `σ_ij = ½<{ΔR_i, ΔR_j}>` is the identity.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hilbert::{create, destroy, FockSpace, Op};
use crate::master::{trace_product, DensityMatrix, LindbladTerm, LiouvillianSpec};
use crate::num::{c, cabs, ci, cr, Complex, Real};

type RMat<T> = DMatrix<T>;
type CMat<T> = DMatrix<Complex<T>>;

/// Symplectic form `Ω = ⊕ [[0, 1], [−1, 0]]`.
pub fn symplectic_form<T: Real>(n_modes: usize) -> RMat<T> {
    let mut w = RMat::zeros(2 * n_modes, 2 * n_modes);
    for m in 0..n_modes {
        w[(2 * m, 2 * m + 1)] = T::one();
        w[(2 * m + 1, 2 * m)] = -T::one();
    }
    w
}

/// Jump operator `Σ_i c_i a_i + d_i a_i†`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearJump<T: Real> {
    pub annihilation: Vec<Complex<T>>,
    pub creation: Vec<Complex<T>>,
}

impl<T: Real> LinearJump<T> {
    pub fn new(annihilation: Vec<Complex<T>>, creation: Vec<Complex<T>>) -> Result<Self> {
        if annihilation.len() != creation.len() {
            return Err(Error::WrongModeCount { expected: annihilation.len(), got: creation.len() });
        }
        Ok(Self { annihilation, creation })
    }

    /// `c·a_mode + d·a_mode†` on `n_modes` modes.
    pub fn single(n_modes: usize, mode: usize, c: Complex<T>, d: Complex<T>) -> Result<Self> {
        if mode >= n_modes {
            return Err(Error::ModeOutOfRange { index: mode, modes: n_modes });
        }
        let zero = Complex::new(T::zero(), T::zero());
        let mut a = vec![zero; n_modes];
        let mut b = vec![zero; n_modes];
        a[mode] = c;
        b[mode] = d;
        Ok(Self { annihilation: a, creation: b })
    }

    /// `u·a_{mode_a} + v·a_{mode_b}†`.
    pub fn bogoliubov(n_modes: usize, u: T, v: T, mode_a: usize, mode_b: usize) -> Result<Self> {
        let mut j = Self::single(n_modes, mode_a, cr(u), Complex::new(T::zero(), T::zero()))?;
        if mode_b >= n_modes {
            return Err(Error::ModeOutOfRange { index: mode_b, modes: n_modes });
        }
        j.creation[mode_b] += cr(v);
        Ok(j)
    }

    pub fn n_modes(&self) -> usize {
        self.annihilation.len()
    }

    /// Coefficients `l` with `L = lᵀR`.
    pub fn quadrature_coefficients(&self) -> DVector<Complex<T>> {
        let half = T::lit(0.5);
        let mut l = DVector::zeros(2 * self.n_modes());
        for (m, (&a, &b)) in self.annihilation.iter().zip(&self.creation).enumerate() {
            l[2 * m] = (a + b) * cr(half);
            l[2 * m + 1] = (a - b) * ci(half);
        }
        l
    }

    /// Operator on a Fock space whose modes match.
    pub fn to_op(&self, space: &FockSpace) -> Result<Op<T>> {
        if space.n_modes() != self.n_modes() {
            return Err(Error::WrongModeCount { expected: self.n_modes(), got: space.n_modes() });
        }
        let mut op = Op::zeros(space);
        for m in 0..self.n_modes() {
            op = op.add(&destroy(space, m)?.scale(self.annihilation[m]))?;
            op = op.add(&create(space, m)?.scale(self.creation[m]))?;
        }
        Ok(op)
    }

    /// Projects a Fock-space operator onto the ladder operators; fails when
    /// the remainder is not negligible.
    pub fn from_op(op: &Op<T>) -> Result<Self> {
        let space = op.space();
        let mut annihilation = Vec::new();
        let mut creation = Vec::new();
        let mut rebuilt = Op::zeros(space);
        for m in 0..space.n_modes() {
            let a = destroy::<T>(space, m)?;
            let ad = a.adjoint();
            let norm = trace_product(ad.matrix(), a.matrix()).re;
            let cm = trace_product(ad.matrix(), op.matrix()) / cr(norm);
            let dm = trace_product(a.matrix(), op.matrix()) / cr(norm);
            rebuilt = rebuilt.add(&a.scale(cm))?.add(&ad.scale(dm))?;
            annihilation.push(cm);
            creation.push(dm);
        }
        let residual = crate::hilbert::max_abs(&(op.matrix() - rebuilt.matrix()));
        let scale = T::one().max(crate::hilbert::max_abs(op.matrix()));
        if residual > T::tol(1e-12) * scale {
            return Err(Error::NonlinearJump(residual.as_f64()));
        }
        Ok(Self { annihilation, creation })
    }
}

/// `H = ½ RᵀGR` with `G` real symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticHamiltonian<T: Real> {
    g: RMat<T>,
}

impl<T: Real> QuadraticHamiltonian<T> {
    pub fn zero(n_modes: usize) -> Self {
        Self { g: RMat::zeros(2 * n_modes, 2 * n_modes) }
    }

    pub fn from_matrix(g: RMat<T>) -> Result<Self> {
        if g.nrows() != g.ncols() || g.nrows() % 2 != 0 {
            return Err(Error::InvalidParameter { name: "hamiltonian", reason: "G must be 2M x 2M".into() });
        }
        let asym = (&g - g.transpose()).amax();
        if asym > T::tol(1e-12) * T::one().max(g.amax()) {
            return Err(Error::NonHermitian(asym.as_f64()));
        }
        Ok(Self { g })
    }

    pub fn n_modes(&self) -> usize {
        self.g.nrows() / 2
    }

    pub fn matrix(&self) -> &RMat<T> {
        &self.g
    }

    /// Adds `ω·a_m†a_m` (up to a constant).
    pub fn add_number(&mut self, mode: usize, omega: T) -> Result<()> {
        if mode >= self.n_modes() {
            return Err(Error::ModeOutOfRange { index: mode, modes: self.n_modes() });
        }
        let h = omega * T::lit(0.5);
        self.g[(2 * mode, 2 * mode)] += h;
        self.g[(2 * mode + 1, 2 * mode + 1)] += h;
        Ok(())
    }

    /// Fock-space operator `½ RᵀGR`.
    pub fn to_op(&self, space: &FockSpace) -> Result<Op<T>> {
        if space.n_modes() != self.n_modes() {
            return Err(Error::WrongModeCount { expected: self.n_modes(), got: space.n_modes() });
        }
        let r = quadrature_ops(space)?;
        let mut h = Op::zeros(space);
        for i in 0..r.len() {
            for j in 0..r.len() {
                let gij = self.g[(i, j)];
                if gij != T::zero() {
                    h = h.add(&r[i].mul(&r[j])?.scale(cr(gij * T::lit(0.5))))?;
                }
            }
        }
        // remove rounding asymmetry
        let m = (h.matrix() + h.matrix().adjoint()) * cr(T::lit(0.5));
        Op::from_matrix(space, m)
    }
}

/// `(x_1, p_1, x_2, p_2, …)` as Fock-space operators.
pub fn quadrature_ops<T: Real>(space: &FockSpace) -> Result<Vec<Op<T>>> {
    let mut r = Vec::with_capacity(2 * space.n_modes());
    for m in 0..space.n_modes() {
        let a = destroy::<T>(space, m)?;
        let ad = a.adjoint();
        r.push(a.add(&ad)?);
        r.push(a.sub(&ad)?.scale(ci(-T::one())));
    }
    Ok(r)
}

/// A generator with linear jumps: the common input of both backends.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel<T: Real> {
    pub hamiltonian: QuadraticHamiltonian<T>,
    pub jumps: Vec<(LinearJump<T>, Complex<T>)>,
}

impl<T: Real> LinearModel<T> {
    pub fn new(n_modes: usize) -> Self {
        Self { hamiltonian: QuadraticHamiltonian::zero(n_modes), jumps: Vec::new() }
    }

    pub fn n_modes(&self) -> usize {
        self.hamiltonian.n_modes()
    }

    pub fn push(&mut self, jump: LinearJump<T>, gamma: Complex<T>) -> Result<()> {
        if jump.n_modes() != self.n_modes() {
            return Err(Error::WrongModeCount { expected: self.n_modes(), got: jump.n_modes() });
        }
        if gamma.re < T::zero() {
            return Err(Error::NegativeRate(gamma.re.as_f64()));
        }
        self.jumps.push((jump, gamma));
        Ok(())
    }

    /// Appends every term of `other`, with rates and Hamiltonian scaled by
    /// `weight`.
    pub fn extend_scaled(&mut self, other: &Self, weight: T) -> Result<()> {
        if other.n_modes() != self.n_modes() {
            return Err(Error::WrongModeCount { expected: self.n_modes(), got: other.n_modes() });
        }
        self.hamiltonian.g += other.hamiltonian.matrix() * weight;
        for (j, g) in &other.jumps {
            self.push(j.clone(), *g * cr(weight))?;
        }
        Ok(())
    }

    pub fn drift_diffusion(&self) -> Result<DriftDiffusion<T>> {
        drift_diffusion(&self.hamiltonian, &self.jumps)
    }

    pub fn to_fock(&self, space: &FockSpace) -> Result<LiouvillianSpec<T>> {
        let h = self.hamiltonian.to_op(space)?;
        let mut terms = Vec::with_capacity(self.jumps.len());
        for (j, g) in &self.jumps {
            terms.push(LindbladTerm::new(j.to_op(space)?, *g)?);
        }
        LiouvillianSpec::new(h, terms)
    }
}

/// Moment equations `d(mean)/dt = A·mean`, `dσ/dt = Aσ + σAᵀ + D`.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftDiffusion<T: Real> {
    pub a: RMat<T>,
    pub d: RMat<T>,
}

impl<T: Real> DriftDiffusion<T> {
    pub fn n_modes(&self) -> usize {
        self.a.nrows() / 2
    }

    /// Largest real part of the drift eigenvalues.
    pub fn spectral_abscissa(&self) -> T {
        self.a.complex_eigenvalues().iter().fold(-T::max_value().unwrap_or_else(T::one), |m, z| m.max(z.re))
    }
}

/// Builds drift and diffusion from a quadratic Hamiltonian and linear jumps
/// with complex rates. For `L = lᵀR` and `M = l̄lᵀ`:
/// `A = 2Ω(G + Σ Im(Γ M))`, `D = 4Ω(Σ Re Γ · Re M)Ωᵀ`.
pub fn drift_diffusion<T: Real>(
    h: &QuadraticHamiltonian<T>,
    jumps: &[(LinearJump<T>, Complex<T>)],
) -> Result<DriftDiffusion<T>> {
    let n = 2 * h.n_modes();
    let omega = symplectic_form::<T>(h.n_modes());
    let mut g = h.matrix().clone();
    let mut dsum = RMat::zeros(n, n);
    for (jump, gamma) in jumps {
        if jump.n_modes() != h.n_modes() {
            return Err(Error::WrongModeCount { expected: h.n_modes(), got: jump.n_modes() });
        }
        if gamma.re < T::zero() {
            return Err(Error::NegativeRate(gamma.re.as_f64()));
        }
        let l = jump.quadrature_coefficients();
        for i in 0..n {
            for j in 0..n {
                let m = l[i].conj() * l[j];
                g[(i, j)] += (*gamma * m).im;
                dsum[(i, j)] += gamma.re * m.re;
            }
        }
    }
    let a = &omega * g * T::lit(2.0);
    let d = &omega * dsum * omega.transpose() * T::lit(4.0);
    let d = (&d + d.transpose()) * T::lit(0.5);
    let min = SymmetricEigen::new(d.clone()).eigenvalues.min();
    if min < -T::tol(1e-10) {
        return Err(Error::Invariant { what: "min eigenvalue of diffusion", value: min.as_f64(), threshold: -1e-10 });
    }
    Ok(DriftDiffusion { a, d })
}

/// First and second quadrature moments.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState<T: Real> {
    pub n_modes: usize,
    pub mean: DVector<T>,
    pub cov: RMat<T>,
}

/// Tolerance of the uncertainty check `σ + iΩ ⪰ 0`.
pub const UNCERTAINTY_TOL: f64 = 1e-8;

impl<T: Real> GaussianState<T> {
    pub fn new(mean: DVector<T>, cov: RMat<T>) -> Result<Self> {
        if cov.nrows() != cov.ncols() || cov.nrows() % 2 != 0 || mean.len() != cov.nrows() {
            return Err(Error::InvalidParameter { name: "gaussian state", reason: "shape mismatch".into() });
        }
        let s = Self { n_modes: cov.nrows() / 2, mean, cov };
        s.check()?;
        Ok(s)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self { n_modes, mean: DVector::zeros(2 * n_modes), cov: RMat::identity(2 * n_modes, 2 * n_modes) }
    }

    pub fn check(&self) -> Result<()> {
        let asym = (&self.cov - self.cov.transpose()).amax();
        if asym > T::tol(1e-12) * T::one().max(self.cov.amax()) {
            return Err(Error::Invariant { what: "covariance asymmetry", value: asym.as_f64(), threshold: 1e-12 });
        }
        let min = self.uncertainty_min_eigenvalue();
        if min < -T::tol(UNCERTAINTY_TOL) {
            return Err(Error::Invariant { what: "min eigenvalue of cov + i Omega", value: min.as_f64(), threshold: -UNCERTAINTY_TOL });
        }
        Ok(())
    }

    pub fn uncertainty_min_eigenvalue(&self) -> T {
        let omega = symplectic_form::<T>(self.n_modes);
        let m = CMat::from_fn(self.cov.nrows(), self.cov.ncols(), |i, j| c(self.cov[(i, j)], omega[(i, j)]));
        SymmetricEigen::new(m).eigenvalues.min()
    }

    /// Symplectic eigenvalues in ascending order (all 1 for pure states).
    pub fn symplectic_eigenvalues(&self) -> Vec<T> {
        let omega = symplectic_form::<T>(self.n_modes);
        let m = (omega * &self.cov).map(|x| ci(x));
        let eig = nalgebra::Schur::new(m).eigenvalues().unwrap_or_else(|| DVector::zeros(2 * self.n_modes));
        let mut nu: Vec<T> = eig.iter().map(|&z| cabs(z)).collect();
        nu.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        nu.into_iter().step_by(2).collect()
    }

    pub fn var_x(&self, mode: usize) -> T {
        self.cov[(2 * mode, 2 * mode)]
    }

    pub fn var_p(&self, mode: usize) -> T {
        self.cov[(2 * mode + 1, 2 * mode + 1)]
    }

    /// `<a_m>`.
    pub fn mean_a(&self, mode: usize) -> Complex<T> {
        c(self.mean[2 * mode], self.mean[2 * mode + 1]) * cr(T::lit(0.5))
    }

    /// `<a_i† a_j>`.
    pub fn normal_moment(&self, i: usize, j: usize) -> Complex<T> {
        let s = |a: usize, b: usize| self.cov[(a, b)];
        let (xi, pi, xj, pj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        let q = T::lit(0.25);
        let mut z = c((s(xi, xj) + s(pi, pj)) * q, (s(xi, pj) - s(pi, xj)) * q);
        if i == j {
            z -= cr(T::lit(0.5));
        }
        z + self.mean_a(i).conj() * self.mean_a(j)
    }

    /// `<a_i a_j>`.
    pub fn anomalous_moment(&self, i: usize, j: usize) -> Complex<T> {
        let s = |a: usize, b: usize| self.cov[(a, b)];
        let (xi, pi, xj, pj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        let q = T::lit(0.25);
        c((s(xi, xj) - s(pi, pj)) * q, (s(xi, pj) + s(pi, xj)) * q) + self.mean_a(i) * self.mean_a(j)
    }

    pub fn occupation(&self, mode: usize) -> T {
        self.normal_moment(mode, mode).re
    }

    /// `<L†L>` for a linear jump `L`.
    pub fn jump_occupation(&self, jump: &LinearJump<T>) -> Result<T> {
        if jump.n_modes() != self.n_modes {
            return Err(Error::WrongModeCount { expected: self.n_modes, got: jump.n_modes() });
        }
        let (cc, dd) = (&jump.annihilation, &jump.creation);
        let mut s = Complex::new(T::zero(), T::zero());
        for i in 0..self.n_modes {
            for j in 0..self.n_modes {
                let n_ij = self.normal_moment(i, j);
                let m_ij = self.anomalous_moment(i, j);
                // <a_i a_j†> = <a_j† a_i> + δ_ij
                let mut anti = self.normal_moment(j, i);
                if i == j {
                    anti += cr(T::one());
                }
                s += cc[i].conj() * cc[j] * n_ij
                    + cc[i].conj() * dd[j] * self.anomalous_moment(j, i).conj()
                    + dd[i].conj() * cc[j] * m_ij
                    + dd[i].conj() * dd[j] * anti;
            }
        }
        Ok(s.re)
    }

    /// Moments of a Fock-space state (the qubit factor, if any, is traced).
    pub fn from_density(rho: &DensityMatrix<T>) -> Result<Self> {
        let space = rho.space();
        let r = quadrature_ops::<T>(space)?;
        let n = r.len();
        let mean = DVector::from_fn(n, |i, _| trace_product(r[i].matrix(), rho.matrix()).re);
        let mut cov = RMat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let rr = r[i].mul(&r[j])?;
                let v = trace_product(rr.matrix(), rho.matrix()).re - mean[i] * mean[j];
                cov[(i, j)] = v;
                cov[(j, i)] = v;
            }
        }
        Ok(Self { n_modes: n / 2, mean, cov })
    }
}

/// Steady state of a stable drift: solves `Aσ + σAᵀ + D = 0`.
pub fn lyapunov_steady<T: Real>(dd: &DriftDiffusion<T>) -> Result<GaussianState<T>> {
    let abscissa = dd.spectral_abscissa();
    // relative: continuum rates sit around 1e-6
    if abscissa >= -T::tol(1e-12) * dd.a.amax() {
        return Err(Error::UnstableDrift(abscissa.as_f64()));
    }
    let n = dd.a.nrows();
    let id = RMat::<T>::identity(n, n);
    let sys = id.kronecker(&dd.a) + dd.a.kronecker(&id);
    let rhs = DVector::from_column_slice((-&dd.d).as_slice());
    let sol = sys.lu().solve(&rhs).ok_or(Error::UnstableDrift(abscissa.as_f64()))?;
    let cov = RMat::from_column_slice(n, n, sol.as_slice());
    let cov = (&cov + cov.transpose()) * T::lit(0.5);
    let residual = (&dd.a * &cov + &cov * dd.a.transpose() + &dd.d).amax();
    let scale = T::one().max(dd.d.amax()).max(dd.a.amax());
    if residual > T::tol(1e-10) * scale {
        return Err(Error::NoConvergence(residual.as_f64()));
    }
    GaussianState::new(DVector::zeros(n), cov)
}

/// Propagator of the moments over time `t`: `mean → Φ·mean`,
/// `σ → ΦσΦᵀ + W`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap<T: Real> {
    pub phi: RMat<T>,
    pub w: RMat<T>,
}

impl<T: Real> AffineMap<T> {
    /// `Φ = e^{At}`, `W = ∫₀ᵗ e^{As} D e^{Aᵀs} ds` from one block exponential.
    /// Long horizons are split into `2^s` equal steps composed by squaring;
    /// the block exponential contains `e^{−At}` and loses everything to
    /// cancellation once `‖At‖` is large.
    pub fn new(dd: &DriftDiffusion<T>, t: T) -> Self {
        let norm = dd.a.amax() * T::from_usize(dd.a.nrows()).expect("dimension") * t.abs();
        let mut squarings = 0u32;
        let mut h = t;
        let mut scaled = norm;
        while scaled > T::lit(0.5) && squarings < 200 {
            h *= T::lit(0.5);
            scaled *= T::lit(0.5);
            squarings += 1;
        }
        let mut map = Self::block_exponential(dd, h);
        for _ in 0..squarings {
            map = map.compose(&map);
        }
        map
    }

    fn block_exponential(dd: &DriftDiffusion<T>, t: T) -> Self {
        let n = dd.a.nrows();
        let mut big = RMat::zeros(2 * n, 2 * n);
        big.view_mut((0, 0), (n, n)).copy_from(&(-&dd.a * t));
        big.view_mut((0, n), (n, n)).copy_from(&(&dd.d * t));
        big.view_mut((n, n), (n, n)).copy_from(&(dd.a.transpose() * t));
        let e = big.exp();
        let f12 = e.view((0, n), (n, n)).into_owned();
        let f22 = e.view((n, n), (n, n)).into_owned();
        let phi = f22.transpose();
        let w = &phi * f12;
        let w = (&w + w.transpose()) * T::lit(0.5);
        Self { phi, w }
    }

    pub fn apply(&self, s: &GaussianState<T>) -> GaussianState<T> {
        let cov = &self.phi * &s.cov * self.phi.transpose() + &self.w;
        let cov = (&cov + cov.transpose()) * T::lit(0.5);
        GaussianState { n_modes: s.n_modes, mean: &self.phi * &s.mean, cov }
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &Self) -> Self {
        let phi = &self.phi * &first.phi;
        let w = &self.phi * &first.w * self.phi.transpose() + &self.w;
        Self { phi, w: (&w + w.transpose()) * T::lit(0.5) }
    }
}

pub fn evolve_covariance<T: Real>(state: &GaussianState<T>, dd: &DriftDiffusion<T>, t: T) -> GaussianState<T> {
    AffineMap::new(dd, t).apply(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::master::steady_state;

    fn decay(kappa: f64) -> LinearModel<f64> {
        let mut m = LinearModel::new(1);
        m.push(LinearJump::single(1, 0, cr(1.0), cr(0.0)).unwrap(), cr(kappa)).unwrap();
        m
    }

    #[test]
    fn damped_vacuum_drift_and_diffusion() {
        let dd = decay(0.3).drift_diffusion().unwrap();
        assert!((&dd.a + RMat::identity(2, 2) * 0.15).amax() < 1e-15);
        assert!((&dd.d - RMat::identity(2, 2) * 0.3).amax() < 1e-15);
        let s = lyapunov_steady(&dd).unwrap();
        assert!((s.cov - RMat::identity(2, 2)).amax() < 1e-12);
    }

    #[test]
    fn squeezing_jump_steady_variances() {
        let (u, v) = (1.25f64, 0.75f64);
        let mut m = LinearModel::<f64>::new(1);
        m.push(LinearJump::bogoliubov(1, u, v, 0, 0).unwrap(), cr(0.4)).unwrap();
        let s = lyapunov_steady(&m.drift_diffusion().unwrap()).unwrap();
        assert!((s.var_x(0) - (u - v) * (u - v)).abs() < 1e-12);
        assert!((s.var_p(0) - (u + v) * (u + v)).abs() < 1e-12);
        assert!(s.cov[(0, 1)].abs() < 1e-12);
        let nu = s.symplectic_eigenvalues();
        assert!((nu[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn imaginary_rate_is_hamiltonian_flow() {
        let mut m = LinearModel::<f64>::new(1);
        m.push(LinearJump::bogoliubov(1, 1.25, 0.75, 0, 0).unwrap(), c(0.0, 0.7)).unwrap();
        let dd = m.drift_diffusion().unwrap();
        assert_eq!(dd.d.amax(), 0.0);
        let s0 = GaussianState::new(DVector::zeros(2), RMat::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.5])).unwrap();
        let before = s0.symplectic_eigenvalues();
        let after = evolve_covariance(&s0, &dd, 3.7).symplectic_eigenvalues();
        assert!((before[0] - after[0]).abs() < 1e-10);
    }

    #[test]
    fn unstable_drift_rejected() {
        let mut m = LinearModel::new(1);
        m.push(LinearJump::single(1, 0, cr(0.0), cr(1.0)).unwrap(), cr(1.0)).unwrap();
        assert!(matches!(lyapunov_steady(&m.drift_diffusion().unwrap()), Err(Error::UnstableDrift(_))));
    }

    #[test]
    fn covariance_evolution_limits() {
        let dd = decay(0.5).drift_diffusion().unwrap();
        let vac = GaussianState::vacuum(1);
        assert_eq!(evolve_covariance(&vac, &dd, 0.0).cov, vac.cov);
        assert!((evolve_covariance(&vac, &dd, 7.0).cov - &vac.cov).amax() < 1e-12);

        let mut m = LinearModel::new(1);
        m.push(LinearJump::bogoliubov(1, 1.25, 0.75, 0, 0).unwrap(), c(0.4, 0.1)).unwrap();
        m.push(LinearJump::single(1, 0, cr(1.0), cr(0.0)).unwrap(), cr(0.01)).unwrap();
        let dd = m.drift_diffusion().unwrap();
        let late = evolve_covariance(&vac, &dd, 200.0);
        let ss = lyapunov_steady(&dd).unwrap();
        assert!((late.cov - ss.cov).amax() < 1e-8);
    }

    #[test]
    fn from_op_detects_nonlinear_jumps() {
        let s = FockSpace::two_mode(4, 4).unwrap();
        let j = LinearJump::new(vec![c(0.3, 0.1), cr(0.0)], vec![cr(0.0), c(-0.2, 0.5)]).unwrap();
        let back = LinearJump::from_op(&j.to_op(&s).unwrap()).unwrap();
        for (x, y) in back.annihilation.iter().zip(&j.annihilation) {
            assert!(cabs(x - y) < 1e-14);
        }
        let n = crate::hilbert::number::<f64>(&s, 0).unwrap();
        assert!(matches!(LinearJump::from_op(&n), Err(Error::NonlinearJump(_))));
    }

    #[test]
    fn moments_match_fock_steady_state() {
        let mut m = LinearModel::new(1);
        m.push(LinearJump::bogoliubov(1, 1.1, (1.1f64 * 1.1 - 1.0).sqrt(), 0, 0).unwrap(), c(0.4, -0.05)).unwrap();
        m.push(LinearJump::single(1, 0, cr(0.0), cr(1.0)).unwrap(), c(0.01, 0.02)).unwrap();
        m.push(LinearJump::single(1, 0, cr(1.0), cr(0.0)).unwrap(), c(0.03, 0.0)).unwrap();
        m.hamiltonian.add_number(0, 0.05).unwrap();
        let g = lyapunov_steady(&m.drift_diffusion().unwrap()).unwrap();
        let s = FockSpace::single_mode(40).unwrap();
        let rho = steady_state(&m.to_fock(&s).unwrap()).unwrap();
        let f = GaussianState::from_density(&rho).unwrap();
        assert!((&f.cov - &g.cov).amax() < 1e-8, "{} vs {}", f.cov, g.cov);
        let jump = &m.jumps[0].0;
        let d = jump.to_op(&s).unwrap();
        let dd = d.adjoint().mul(&d).unwrap();
        let fock_occ = rho.expectation(&dd).unwrap().re;
        assert!((g.jump_occupation(jump).unwrap() - fock_occ).abs() < 1e-8);
    }
}
