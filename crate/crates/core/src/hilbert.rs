// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

//! Truncated Fock-space operator algebra for a handful of bosonic modes,
//! optionally tensored with a qubit.
//!
//! Basis ordering is fixed: the qubit factor (if any) comes first, then the
//! modes in ascending index; inside each factor occupations ascend. The qubit
//! basis is `(|0>, |1>)` with `|0>` the ground state, so `σ⁻|1> = |0>` and
//! `σ_z = diag(-1, +1)`.

use nalgebra::{DMatrix, DVector};

use crate::bogoliubov::BogoliubovPair;
use crate::error::{Error, Result};
use crate::num::{cr, Complex, Real};
use crate::sparse::SparseOp;

/// Shape of a truncated Hilbert space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FockSpace {
    mode_dims: Vec<usize>,
    has_qubit: bool,
}

impl FockSpace {
    pub fn new(mode_dims: Vec<usize>, has_qubit: bool) -> Result<Self> {
        if mode_dims.is_empty() && !has_qubit {
            return Err(Error::InvalidSpace("no factors".into()));
        }
        if let Some(d) = mode_dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidSpace(format!("mode dimension {d} < 2")));
        }
        Ok(Self { mode_dims, has_qubit })
    }

    pub fn single_mode(dim: usize) -> Result<Self> {
        Self::new(vec![dim], false)
    }

    pub fn two_mode(dim_a: usize, dim_b: usize) -> Result<Self> {
        Self::new(vec![dim_a, dim_b], false)
    }

    pub fn qubit_only() -> Self {
        Self { mode_dims: Vec::new(), has_qubit: true }
    }

    pub fn qubit_and_mode(dim: usize) -> Result<Self> {
        Self::new(vec![dim], true)
    }

    pub fn mode_dims(&self) -> &[usize] {
        &self.mode_dims
    }

    pub fn n_modes(&self) -> usize {
        self.mode_dims.len()
    }

    pub fn has_qubit(&self) -> bool {
        self.has_qubit
    }

    pub fn dim(&self) -> usize {
        let modes: usize = self.mode_dims.iter().product();
        if self.has_qubit {
            2 * modes
        } else {
            modes
        }
    }

    /// Factor dimensions in basis order (qubit first).
    pub fn factor_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.mode_dims.len() + 1);
        if self.has_qubit {
            dims.push(2);
        }
        dims.extend_from_slice(&self.mode_dims);
        dims
    }

    fn mode_factor(&self, mode: usize) -> Result<usize> {
        if mode >= self.mode_dims.len() {
            return Err(Error::ModeOutOfRange { index: mode, modes: self.mode_dims.len() });
        }
        Ok(mode + usize::from(self.has_qubit))
    }

    /// Occupation numbers of basis state `index`, as `(qubit, modes)`.
    pub fn decompose(&self, mut index: usize) -> (Option<usize>, Vec<usize>) {
        let dims = self.factor_dims();
        let mut digits = vec![0; dims.len()];
        for (k, &d) in dims.iter().enumerate().rev() {
            digits[k] = index % d;
            index /= d;
        }
        if self.has_qubit {
            (Some(digits[0]), digits[1..].to_vec())
        } else {
            (None, digits)
        }
    }

    /// Basis index of the given occupations (inverse of [`decompose`](Self::decompose)).
    pub fn index_of(&self, qubit: Option<usize>, modes: &[usize]) -> usize {
        let mut idx = 0;
        if self.has_qubit {
            idx = qubit.unwrap_or(0);
        }
        for (n, d) in modes.iter().zip(&self.mode_dims) {
            idx = idx * d + n;
        }
        idx
    }

    /// Embeds a single-factor matrix into the full space.
    fn embed<T: Real>(&self, factor: usize, local: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
        let dims = self.factor_dims();
        let mut out = DMatrix::<Complex<T>>::identity(1, 1);
        for (k, &d) in dims.iter().enumerate() {
            out = if k == factor {
                out.kronecker(local)
            } else {
                out.kronecker(&DMatrix::identity(d, d))
            };
        }
        out
    }
}

/// An operator on a [`FockSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct Op<T: Real> {
    space: FockSpace,
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> Op<T> {
    pub fn from_matrix(space: &FockSpace, matrix: DMatrix<Complex<T>>) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidSpace(format!(
                "matrix is {}x{}, space dimension is {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { space: space.clone(), matrix })
    }

    pub fn zeros(space: &FockSpace) -> Self {
        let d = space.dim();
        Self { space: space.clone(), matrix: DMatrix::zeros(d, d) }
    }

    pub fn identity(space: &FockSpace) -> Self {
        let d = space.dim();
        Self { space: space.clone(), matrix: DMatrix::identity(d, d) }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex<T>> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self { space: self.space.clone(), matrix: self.matrix.adjoint() }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let d = self.matrix.nrows();
        let sp = self.to_sparse();
        // ladder-operator products are far sparser than d²
        let matrix = if sp.nnz() * 8 < d * d { sp.mul_left(&other.matrix) } else { &self.matrix * &other.matrix };
        Ok(Self { space: self.space.clone(), matrix })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { space: self.space.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { space: self.space.clone(), matrix: &self.matrix - &other.matrix })
    }

    pub fn scale(&self, z: Complex<T>) -> Self {
        Self { space: self.space.clone(), matrix: &self.matrix * z }
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> T {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn to_sparse(&self) -> SparseOp<T> {
        SparseOp::from_dense(&self.matrix)
    }

    /// `<ψ|X|ψ>` for a state vector on the same space.
    pub fn expectation(&self, psi: &DVector<Complex<T>>) -> Complex<T> {
        psi.dotc(&(&self.matrix * psi))
    }
}

pub(crate) fn max_abs<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| {
        let a = crate::num::cabs(*z);
        if a > acc {
            a
        } else {
            acc
        }
    })
}

fn ladder<T: Real>(dim: usize) -> DMatrix<Complex<T>> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = cr(T::from_usize(n).unwrap().sqrt());
    }
    a
}

/// Annihilation operator of `mode`, identity on every other factor.
pub fn destroy<T: Real>(space: &FockSpace, mode: usize) -> Result<Op<T>> {
    let factor = space.mode_factor(mode)?;
    let local = ladder::<T>(space.mode_dims[mode]);
    Ok(Op { space: space.clone(), matrix: space.embed(factor, &local) })
}

pub fn create<T: Real>(space: &FockSpace, mode: usize) -> Result<Op<T>> {
    Ok(destroy(space, mode)?.adjoint())
}

/// `a†a` of `mode`.
pub fn number<T: Real>(space: &FockSpace, mode: usize) -> Result<Op<T>> {
    let a = destroy::<T>(space, mode)?;
    a.adjoint().mul(&a)
}

/// Qubit lowering operator `σ⁻`.
pub fn qubit_lower<T: Real>(space: &FockSpace) -> Result<Op<T>> {
    if !space.has_qubit {
        return Err(Error::NoQubit);
    }
    let mut sm = DMatrix::zeros(2, 2);
    sm[(0, 1)] = Complex::new(T::one(), T::zero());
    Ok(Op { space: space.clone(), matrix: space.embed(0, &sm) })
}

pub fn qubit_raise<T: Real>(space: &FockSpace) -> Result<Op<T>> {
    Ok(qubit_lower(space)?.adjoint())
}

/// Qubit `σ_z = |1><1| - |0><0|`.
pub fn qubit_z<T: Real>(space: &FockSpace) -> Result<Op<T>> {
    if !space.has_qubit {
        return Err(Error::NoQubit);
    }
    let mut sz = DMatrix::zeros(2, 2);
    sz[(0, 0)] = cr(-T::one());
    sz[(1, 1)] = cr(T::one());
    Ok(Op { space: space.clone(), matrix: space.embed(0, &sz) })
}

/// `D = u·a + v·b†`, or `u·a + v·a†` when `mode_a == mode_b`.
pub fn bogoliubov_op<T: Real>(
    space: &FockSpace,
    pair: &BogoliubovPair<T>,
    mode_a: usize,
    mode_b: usize,
) -> Result<Op<T>> {
    pair.check_identity()?;
    let a = destroy::<T>(space, mode_a)?;
    let b_dag = create::<T>(space, mode_b)?;
    a.scale(cr(pair.u)).add(&b_dag.scale(cr(pair.v)))
}

/// Which squeezed vacuum to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqueezeKind {
    /// Annihilated by `cosh r·a + sinh r·a†`.
    Single { mode: usize },
    /// Annihilated by `cosh r·a + sinh r·b†` and `cosh r·b + sinh r·a†`.
    TwoMode { mode_a: usize, mode_b: usize },
}

/// Default bound on the analytic amplitude mass beyond the truncation.
pub const SQUEEZED_CUTOFF_AMPLITUDE: f64 = 1e-10;

/// Squeezed vacuum with `cosh r = u`, `sinh r = v`; a qubit factor, if
/// present, is put in its ground state and other modes in vacuum.
///
/// Fails if the analytic amplitude mass on the top two levels and beyond
/// exceeds `cutoff` (use [`SQUEEZED_CUTOFF_AMPLITUDE`] by default).
pub fn squeezed_vacuum<T: Real>(
    space: &FockSpace,
    r: T,
    kind: SqueezeKind,
    cutoff: T,
) -> Result<DVector<Complex<T>>> {
    let u = r.cosh();
    let v = r.sinh();
    let mut psi = DVector::zeros(space.dim());
    let others = |set: &[(usize, usize)]| {
        let mut occ = vec![0; space.n_modes()];
        for &(m, n) in set {
            occ[m] = n;
        }
        occ
    };
    match kind {
        SqueezeKind::Single { mode } => {
            let n_max = space.mode_dims.get(mode).copied().ok_or(Error::ModeOutOfRange {
                index: mode,
                modes: space.n_modes(),
            })?;
            // u√(n+1) c_{n+1} + v√n c_{n-1} = 0, c_0 = 1/√u
            let amps = single_mode_amplitudes(u, v, n_max, cutoff);
            let tail = amps.tail_norm;
            if tail > cutoff {
                return Err(Error::TruncationTooSmall { amplitude: tail.as_f64(), threshold: cutoff.as_f64() });
            }
            for (n, &cn) in amps.values.iter().enumerate() {
                psi[space.index_of(Some(0), &others(&[(mode, n)]))] = cr(cn);
            }
        }
        SqueezeKind::TwoMode { mode_a, mode_b } => {
            for m in [mode_a, mode_b] {
                if m >= space.n_modes() {
                    return Err(Error::ModeOutOfRange { index: m, modes: space.n_modes() });
                }
            }
            let n_max = space.mode_dims[mode_a].min(space.mode_dims[mode_b]);
            // c_n = (-v/u)^n / u
            let ratio = -v / u;
            let top = n_max.saturating_sub(2);
            let tail = (ratio * ratio).powi(top as i32) / (u * u * (T::one() - ratio * ratio));
            let tail = tail.sqrt();
            if tail > cutoff {
                return Err(Error::TruncationTooSmall { amplitude: tail.as_f64(), threshold: cutoff.as_f64() });
            }
            let mut cn = T::one() / u;
            for n in 0..n_max {
                psi[space.index_of(Some(0), &others(&[(mode_a, n), (mode_b, n)]))] = cr(cn);
                cn *= ratio;
            }
        }
    }
    let norm = psi.norm();
    Ok(psi / cr(norm))
}

struct Amplitudes<T> {
    values: Vec<T>,
    tail_norm: T,
}

fn single_mode_amplitudes<T: Real>(u: T, v: T, n_max: usize, cutoff: T) -> Amplitudes<T> {
    let mut values = vec![T::zero(); n_max];
    let c0 = T::one() / u.sqrt();
    let ratio = v / u;
    // even levels only; walk far enough past the cutoff to bound the tail
    let mut tail = T::zero();
    let mut prev = c0;
    let mut n = 0usize;
    let limit = n_max + 4000;
    loop {
        if n < n_max {
            values[n] = prev;
        }
        if n + 2 >= n_max {
            tail += prev * prev;
        }
        if n >= limit || (n + 2 >= n_max && prev.abs() < cutoff * T::lit(1e-6)) {
            break;
        }
        let nn = T::from_usize(n).unwrap();
        // c_{n+2} = -(v/u) √((n+1)/(n+2)) c_n
        prev = -ratio * ((nn + T::one()) / (nn + T::lit(2.0))).sqrt() * prev;
        n += 2;
    }
    Amplitudes { values, tail_norm: tail.sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn re(z: Complex<f64>) -> f64 {
        assert!(z.im.abs() < 1e-15);
        z.re
    }

    #[test]
    fn destroy_small_dims() {
        let s = FockSpace::single_mode(2).unwrap();
        let a = destroy::<f64>(&s, 0).unwrap();
        assert_eq!(re(a.matrix()[(0, 1)]), 1.0);
        assert_eq!(re(a.matrix()[(0, 0)]), 0.0);
        assert_eq!(re(a.matrix()[(1, 0)]), 0.0);
        assert_eq!(re(a.matrix()[(1, 1)]), 0.0);

        let s3 = FockSpace::single_mode(3).unwrap();
        let a3 = destroy::<f64>(&s3, 0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = match (i, j) {
                    (0, 1) => 1.0,
                    (1, 2) => 2f64.sqrt(),
                    _ => 0.0,
                };
                assert_abs_diff_eq!(re(a3.matrix()[(i, j)]), expect, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn destroy_second_mode_is_kronecker() {
        let s = FockSpace::two_mode(3, 3).unwrap();
        let a1 = destroy::<f64>(&s, 1).unwrap();
        let local = destroy::<f64>(&FockSpace::single_mode(3).unwrap(), 0).unwrap();
        // explicit I(3) ⊗ a(3)
        for i in 0..9 {
            for j in 0..9 {
                let (ia, ib) = (i / 3, i % 3);
                let (ja, jb) = (j / 3, j % 3);
                let expect = if ia == ja { local.matrix()[(ib, jb)] } else { Complex::new(0.0, 0.0) };
                assert_eq!(a1.matrix()[(i, j)], expect);
            }
        }
    }

    #[test]
    fn mode_index_out_of_range() {
        let s = FockSpace::single_mode(4).unwrap();
        assert_eq!(destroy::<f64>(&s, 1).unwrap_err(), Error::ModeOutOfRange { index: 1, modes: 1 });
    }

    #[test]
    fn invalid_spaces() {
        assert!(FockSpace::single_mode(1).is_err());
        assert!(FockSpace::new(vec![], false).is_err());
    }

    #[test]
    fn qubit_operators() {
        let q = FockSpace::qubit_only();
        let sm = qubit_lower::<f64>(&q).unwrap();
        assert_eq!(re(sm.matrix()[(0, 1)]), 1.0);
        assert_eq!(sm.matrix().iter().filter(|z| z.norm() > 0.0).count(), 1);

        let s = FockSpace::qubit_and_mode(2).unwrap();
        let sz = qubit_z::<f64>(&s).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| re(sz.matrix()[(i, i)])).collect();
        assert_eq!(diag, vec![-1.0, -1.0, 1.0, 1.0]);

        let sm = qubit_lower::<f64>(&s).unwrap();
        let anti = sm.adjoint().mul(&sm).unwrap().add(&sm.mul(&sm.adjoint()).unwrap()).unwrap();
        assert_eq!(anti, Op::identity(&s));

        assert_eq!(qubit_lower::<f64>(&FockSpace::single_mode(3).unwrap()).unwrap_err(), Error::NoQubit);
        assert_eq!(qubit_z::<f64>(&FockSpace::single_mode(3).unwrap()).unwrap_err(), Error::NoQubit);
    }

    #[test]
    fn canonical_commutator_fails_only_on_top_level() {
        let n = 7;
        let s = FockSpace::single_mode(n).unwrap();
        let a = destroy::<f64>(&s, 0).unwrap();
        let comm = a.commutator(&a.adjoint()).unwrap();
        for i in 0..n {
            for j in 0..n {
                let expect = match (i == j, i == n - 1) {
                    (true, false) => 1.0,
                    (true, true) => -((n - 1) as f64),
                    _ => 0.0,
                };
                assert_abs_diff_eq!(re(comm.matrix()[(i, j)]), expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn products_require_identical_spaces() {
        let a = destroy::<f64>(&FockSpace::single_mode(3).unwrap(), 0).unwrap();
        let b = destroy::<f64>(&FockSpace::single_mode(4).unwrap(), 0).unwrap();
        assert_eq!(a.mul(&b).unwrap_err(), Error::SpaceMismatch);
    }

    #[test]
    fn bogoliubov_identity_transformation() {
        let s = FockSpace::single_mode(5).unwrap();
        let pair = BogoliubovPair::new(1.0, 0.0, 1.0).unwrap();
        let d = bogoliubov_op::<f64>(&s, &pair, 0, 0).unwrap();
        assert_eq!(d, destroy(&s, 0).unwrap());
    }

    #[test]
    fn bogoliubov_rejects_bad_pair() {
        let s = FockSpace::single_mode(5).unwrap();
        let bad = BogoliubovPair { u: 1.2, v: 0.5, gbar: 1.0 };
        assert!(matches!(bogoliubov_op(&s, &bad, 0, 0), Err(Error::BogoliubovIdentity { .. })));
    }

    #[test]
    fn bogoliubov_commutator_away_from_edge() {
        let n = 12;
        let s = FockSpace::single_mode(n).unwrap();
        let pair = BogoliubovPair::new(1.25, 0.75, 1.0).unwrap();
        let d = bogoliubov_op::<f64>(&s, &pair, 0, 0).unwrap();
        let comm = d.commutator(&d.adjoint()).unwrap();
        for i in 0..n - 2 {
            for j in 0..n - 2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(comm.matrix()[(i, j)].re, expect, epsilon = 1e-12);
                assert_abs_diff_eq!(comm.matrix()[(i, j)].im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn two_mode_bogoliubov_pair_commutes() {
        let n = 6;
        let s = FockSpace::two_mode(n, n).unwrap();
        let pair = BogoliubovPair::new(5f64.sqrt(), 2.0, 1.0).unwrap();
        let d = bogoliubov_op::<f64>(&s, &pair, 0, 1).unwrap();
        let dbar = bogoliubov_op::<f64>(&s, &pair, 1, 0).unwrap();
        let comm = d.commutator(&dbar).unwrap();
        for i in 0..s.dim() {
            let (_, occ) = s.decompose(i);
            if occ.iter().any(|&k| k >= n - 1) {
                continue;
            }
            for j in 0..s.dim() {
                assert!(comm.matrix()[(i, j)].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn squeezed_vacuum_r_zero_is_vacuum() {
        let s = FockSpace::single_mode(6).unwrap();
        let psi = squeezed_vacuum::<f64>(&s, 0.0, SqueezeKind::Single { mode: 0 }, 1e-10).unwrap();
        assert_abs_diff_eq!(psi[0].re, 1.0, epsilon = 1e-15);
        assert!(psi.iter().skip(1).all(|z| z.norm() == 0.0));
    }

    #[test]
    fn squeezed_vacuum_variance_and_dark_condition() {
        // e^r = u + v = 2 for u = 1.25, v = 0.75
        let r = 2f64.ln();
        let s = FockSpace::single_mode(100).unwrap();
        let psi = squeezed_vacuum::<f64>(&s, r, SqueezeKind::Single { mode: 0 }, 1e-10).unwrap();
        let a = destroy::<f64>(&s, 0).unwrap();
        let x = a.add(&a.adjoint()).unwrap();
        let x2 = x.mul(&x).unwrap();
        assert_abs_diff_eq!(x2.expectation(&psi).re, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(x.expectation(&psi).norm(), 0.0, epsilon = 1e-15);

        let pair = BogoliubovPair::new(1.25, 0.75, 1.0).unwrap();
        let d = bogoliubov_op::<f64>(&s, &pair, 0, 0).unwrap();
        assert!((d.matrix() * &psi).norm() < 1e-8);
    }

    #[test]
    fn squeezed_vacuum_rejects_small_truncation() {
        let s = FockSpace::single_mode(30).unwrap();
        let err = squeezed_vacuum::<f64>(&s, 2f64.ln(), SqueezeKind::Single { mode: 0 }, 1e-10).unwrap_err();
        assert!(matches!(err, Error::TruncationTooSmall { .. }));
    }

    #[test]
    fn two_mode_squeezed_vacuum_is_dark() {
        let v = 0.3f64;
        let pair = BogoliubovPair::new((1.0 + v * v).sqrt(), v, 1.0).unwrap();
        let s = FockSpace::two_mode(21, 21).unwrap();
        let psi = squeezed_vacuum::<f64>(&s, pair.r(), SqueezeKind::TwoMode { mode_a: 0, mode_b: 1 }, 1e-10).unwrap();
        let d = bogoliubov_op::<f64>(&s, &pair, 0, 1).unwrap();
        let dbar = bogoliubov_op::<f64>(&s, &pair, 1, 0).unwrap();
        assert!((d.matrix() * &psi).norm() < 1e-8);
        assert!((dbar.matrix() * &psi).norm() < 1e-8);
    }

    #[test]
    fn decompose_round_trip() {
        let s = FockSpace::new(vec![3, 4], true).unwrap();
        for i in 0..s.dim() {
            let (q, occ) = s.decompose(i);
            assert_eq!(s.index_of(q, &occ), i);
        }
    }
}
