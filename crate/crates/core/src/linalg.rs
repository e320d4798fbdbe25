// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

//! Sparse direct solve used by the steady-state finder: connected-component
//! reduction, reverse Cuthill–McKee ordering and a banded LU with partial
//! pivoting, plus a fill-reducing sparse LU for large double-precision
//! systems.

use std::collections::VecDeque;

use crate::num::{cabs, Complex, Real};

/// Coordinate-format square matrix with duplicates merged.
#[derive(Clone, Debug)]
pub struct Triplets<T: Real> {
    pub n: usize,
    pub entries: Vec<(usize, usize, Complex<T>)>,
}

impl<T: Real> Triplets<T> {
    /// Sorts by `(row, col)` and sums duplicates; drops exact zeros.
    pub fn from_unmerged(n: usize, mut entries: Vec<(usize, usize, Complex<T>)>) -> Self {
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut merged: Vec<(usize, usize, Complex<T>)> = Vec::with_capacity(entries.len());
        for (i, j, z) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += z,
                _ => merged.push((i, j, z)),
            }
        }
        merged.retain(|&(_, _, z)| z.re != T::zero() || z.im != T::zero());
        Self { n, entries: merged }
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().fold(T::zero(), |m, &(_, _, z)| {
            let a = cabs(z);
            if a > m {
                a
            } else {
                m
            }
        })
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = vec![Complex::new(T::zero(), T::zero()); self.n];
        for &(i, j, z) in &self.entries {
            y[i] += z * x[j];
        }
        y
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Indices belonging to any connected component (of the symmetrized
/// pattern) that contains one of `seeds`, in ascending order.
pub fn components_containing<T: Real>(a: &Triplets<T>, seeds: &[usize]) -> Vec<usize> {
    let mut uf = UnionFind::new(a.n);
    for &(i, j, _) in &a.entries {
        uf.union(i, j);
    }
    let mut keep = vec![false; a.n];
    let roots: Vec<usize> = seeds.iter().map(|&s| uf.find(s)).collect();
    let mut root_flag = vec![false; a.n];
    for r in roots {
        root_flag[r] = true;
    }
    for (i, k) in keep.iter_mut().enumerate() {
        *k = root_flag[uf.find(i)];
    }
    (0..a.n).filter(|&i| keep[i]).collect()
}

/// Reverse Cuthill–McKee permutation of the symmetrized pattern;
/// `perm[new] = old`.
pub fn rcm_order(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        if i != j {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));
    for &start in &by_degree {
        if visited[start] {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// LU factors of a band matrix with partial pivoting.
pub struct BandLu<T: Real> {
    n: usize,
    kl: usize,
    /// Width of the stored U band (`ku + kl` after pivoting fill-in).
    ku: usize,
    /// Row `i` stores columns `i - kl ..= i + ku`, shifted by `kl`.
    rows: Vec<Vec<Complex<T>>>,
    pivots: Vec<usize>,
}

impl<T: Real> BandLu<T> {
    /// Factorizes `a` (given in the already-permuted index space).
    pub fn factor(a: &Triplets<T>) -> Self {
        let n = a.n;
        let (mut kl, mut ku0) = (0usize, 0usize);
        for &(i, j, _) in &a.entries {
            if i > j {
                kl = kl.max(i - j);
            } else {
                ku0 = ku0.max(j - i);
            }
        }
        let ku = ku0 + kl;
        let width = kl + ku + 1;
        let zero = Complex::new(T::zero(), T::zero());
        let mut rows = vec![vec![zero; width]; n];
        for &(i, j, z) in &a.entries {
            rows[i][j + kl - i] += z;
        }
        let mut lu = Self { n, kl, ku, rows, pivots: vec![0; n] };
        lu.eliminate();
        lu
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex<T> {
        self.rows[i][j + self.kl - i]
    }

    fn eliminate(&mut self) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = cabs(self.at(k, k));
            for i in k + 1..=last_row {
                let m = cabs(self.at(i, k));
                if m > best {
                    best = m;
                    p = i;
                }
            }
            self.pivots[k] = p;
            let last_col = (k + ku).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (ik, ip) = (j + kl - k, j + kl - p);
                    let tmp = self.rows[k][ik];
                    self.rows[k][ik] = self.rows[p][ip];
                    self.rows[p][ip] = tmp;
                }
            }
            let pivot = self.at(k, k);
            if pivot.re == T::zero() && pivot.im == T::zero() {
                continue;
            }
            let (head, tail) = self.rows.split_at_mut(k + 1);
            let row_k = &head[k];
            for (off, row_i) in tail.iter_mut().take(last_row - k).enumerate() {
                let i = k + 1 + off;
                let l = row_i[k + kl - i] / pivot;
                if l.re == T::zero() && l.im == T::zero() {
                    continue;
                }
                row_i[k + kl - i] = l;
                for j in k + 1..=last_col {
                    let rk = row_k[j + kl - k];
                    row_i[j + kl - i] -= l * rk;
                }
            }
        }
    }

    /// `min |U_kk| / max |U_kk|`; near zero signals a singular matrix.
    pub fn pivot_ratio(&self) -> T {
        let mut lo = T::max_value().unwrap_or_else(T::one);
        let mut hi = T::zero();
        for k in 0..self.n {
            let m = cabs(self.at(k, k));
            lo = lo.min(m);
            hi = hi.max(m);
        }
        if hi == T::zero() {
            T::zero()
        } else {
            lo / hi
        }
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            x.swap(k, p);
            let xk = x[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                let l = self.at(i, k);
                x[i] -= l * xk;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..=(k + ku).min(n - 1) {
                s -= self.at(k, j) * x[j];
            }
            x[k] = s / self.at(k, k);
        }
        x
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }
}

/// Solves `A x = b` by a fill-reducing sparse LU (column approximate
/// minimum degree, partial pivoting), carried out in `f64`.
///
/// Returns `x` and an inverse-condition proxy `1 / (‖A‖∞ ‖x‖∞ / ‖b‖∞)`,
/// which tends to zero for a singular `A`. `None` if the factorization
/// fails or the solution is not finite.
pub fn sparse_lu_solve<T: Real>(a: &Triplets<T>, b: &[Complex<T>]) -> Option<(Vec<Complex<T>>, T)> {
    use faer::linalg::solvers::Solve;
    use faer::sparse::{SparseColMat, Triplet};

    let n = a.n;
    let to = |z: Complex<T>| faer::c64::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN));
    let trip: Vec<_> = a.entries.iter().map(|&(i, j, z)| Triplet::new(i, j, to(z))).collect();
    let m = SparseColMat::<usize, faer::c64>::try_new_from_triplets(n, n, &trip).ok()?;
    let lu = m.sp_lu().ok()?;
    let rhs = faer::Mat::<faer::c64>::from_fn(n, 1, |i, _| to(b[i]));
    let x = lu.solve(&rhs);
    let mut row_sum = vec![0.0f64; n];
    for &(i, _, z) in &a.entries {
        row_sum[i] += cabs(z).to_f64().unwrap_or(f64::NAN);
    }
    let norm_a = row_sum.iter().fold(0.0f64, |m, &v| m.max(v));
    let norm_b = b.iter().fold(0.0f64, |m, &z| m.max(cabs(z).to_f64().unwrap_or(f64::NAN)));
    let mut norm_x = 0.0f64;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let z = x[(i, 0)];
        if !(z.re.is_finite() && z.im.is_finite()) {
            return None;
        }
        norm_x = norm_x.max(z.norm());
        out.push(Complex::new(T::lit(z.re), T::lit(z.im)));
    }
    let proxy = if norm_a * norm_x > 0.0 { norm_b / (norm_a * norm_x) } else { 0.0 };
    Some((out, T::lit(proxy.min(1.0))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn band_lu_matches_dense_solve() {
        // needs pivoting: zero on the leading diagonal entry
        let n: usize = 9;
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i.saturating_sub(2)..(i + 3).min(n) {
                let v = if i == j && i == 0 { c(0.0, 0.0) } else { c((i * 7 + j * 3) as f64 % 5.0 - 2.0, (i + 2 * j) as f64 % 3.0) };
                entries.push((i, j, v));
            }
        }
        let a = Triplets::from_unmerged(n, entries);
        let dense = DMatrix::from_fn(n, n, |i, j| {
            a.entries.iter().find(|e| e.0 == i && e.1 == j).map(|e| e.2).unwrap_or(c(0.0, 0.0))
        });
        let b: Vec<_> = (0..n).map(|i| c(i as f64, 1.0)).collect();
        let x = BandLu::factor(&a).solve(&b);
        let r = &dense * DVector::from_vec(x) - DVector::from_vec(b);
        assert!(r.norm() < 1e-10, "residual {}", r.norm());
    }

    #[test]
    fn sparse_lu_matches_band_lu() {
        let n: usize = 40;
        let mut entries = Vec::new();
        for i in 0..n {
            entries.push((i, i, c(4.0 + (i % 3) as f64, 0.5)));
            entries.push((i, (i * 7 + 3) % n, c(-1.0, 0.25)));
            entries.push(((i * 11 + 5) % n, i, c(0.5, -1.0)));
        }
        let a = Triplets::from_unmerged(n, entries);
        let b: Vec<_> = (0..n).map(|i| c(1.0, i as f64 / 10.0)).collect();
        let band = BandLu::factor(&a).solve(&b);
        let (x, proxy) = sparse_lu_solve(&a, &b).unwrap();
        for (p, q) in x.iter().zip(&band) {
            assert!((p - q).norm() < 1e-12);
        }
        assert!(proxy > 1e-3);
        let singular = Triplets::from_unmerged(2, vec![(0, 0, c(1.0, 0.0)), (0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0)), (1, 1, c(1.0, 0.0))]);
        if let Some((_, p)) = sparse_lu_solve(&singular, &[c(1.0, 0.0), c(0.0, 0.0)]) {
            assert!(p < 1e-13);
        }
    }

    #[test]
    fn rcm_reduces_bandwidth_of_shuffled_chain() {
        let n = 50;
        let shuffle: Vec<usize> = (0..n).map(|i| (i * 17) % n).collect();
        let edges: Vec<_> = (0..n - 1).map(|i| (shuffle[i], shuffle[i + 1])).collect();
        let perm = rcm_order(n, &edges);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let bw = edges.iter().map(|&(i, j)| inv[i].abs_diff(inv[j])).max().unwrap();
        assert_eq!(bw, 1);
    }

    #[test]
    fn components_follow_seeds() {
        let a = Triplets::<f64>::from_unmerged(5, vec![(0, 1, c(1.0, 0.0)), (3, 4, c(1.0, 0.0)), (2, 2, c(1.0, 0.0))]);
        assert_eq!(components_containing(&a, &[1]), vec![0, 1]);
        assert_eq!(components_containing(&a, &[4, 2]), vec![2, 3, 4]);
    }
}
