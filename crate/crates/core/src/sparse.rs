// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

//! Coordinate-format operator used on the hot paths (master-equation
//! right-hand sides, superoperator assembly). Ladder operators have `O(d)`
//! nonzeros, so sparse products beat dense ones by a factor of `d`.

use nalgebra::DMatrix;

use crate::num::{Complex, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct SparseOp<T: Real> {
    dim: usize,
    /// `(row, col, value)`, sorted by row then column, no explicit zeros.
    entries: Vec<(usize, usize, Complex<T>)>,
}

impl<T: Real> SparseOp<T> {
    pub fn from_dense(m: &DMatrix<Complex<T>>) -> Self {
        let mut entries = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                if z.re != T::zero() || z.im != T::zero() {
                    entries.push((i, j, z));
                }
            }
        }
        Self { dim: m.nrows(), entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, Complex<T>)] {
        &self.entries
    }

    pub fn to_dense(&self) -> DMatrix<Complex<T>> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(i, j, z) in &self.entries {
            m[(i, j)] += z;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|&(i, j, z)| (j, i, z.conj())).collect();
        entries.sort_by_key(|&(i, j, _)| (i, j));
        Self { dim: self.dim, entries }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|&(i, j, z)| (i, j, z * s)).collect() }
    }

    /// `out += s·(self · x)`.
    pub fn mul_left_acc(&self, x: &DMatrix<Complex<T>>, s: Complex<T>, out: &mut DMatrix<Complex<T>>) {
        let n = x.ncols();
        for &(i, k, z) in &self.entries {
            let w = z * s;
            for j in 0..n {
                out[(i, j)] += w * x[(k, j)];
            }
        }
    }

    /// `out += s·(x · self)`.
    pub fn mul_right_acc(&self, x: &DMatrix<Complex<T>>, s: Complex<T>, out: &mut DMatrix<Complex<T>>) {
        let n = x.nrows();
        for &(k, j, z) in &self.entries {
            let w = z * s;
            // column-major storage: walking rows of one column is contiguous
            let src = x.column(k);
            let mut dst = out.column_mut(j);
            for i in 0..n {
                dst[i] += src[i] * w;
            }
        }
    }

    pub fn mul_left(&self, x: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
        let mut out = DMatrix::zeros(self.dim, x.ncols());
        self.mul_left_acc(x, Complex::new(T::one(), T::zero()), &mut out);
        out
    }

    pub fn mul_right(&self, x: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
        let mut out = DMatrix::zeros(x.nrows(), self.dim);
        self.mul_right_acc(x, Complex::new(T::one(), T::zero()), &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{destroy, FockSpace};

    #[test]
    fn sparse_products_match_dense() {
        let s = FockSpace::new(vec![3, 4], true).unwrap();
        let a = destroy::<f64>(&s, 1).unwrap();
        let sp = a.to_sparse();
        assert_eq!(sp.to_dense(), *a.matrix());
        let x = DMatrix::from_fn(s.dim(), s.dim(), |i, j| Complex::new((i * 3 + j) as f64, (i as f64) - (j as f64)));
        let left = sp.mul_left(&x) - a.matrix() * &x;
        let right = sp.mul_right(&x) - &x * a.matrix();
        assert!(left.norm() < 1e-12);
        assert!(right.norm() < 1e-12);
        assert_eq!(sp.adjoint().to_dense(), a.matrix().adjoint());
    }
}
