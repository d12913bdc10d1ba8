//! Small dense complex linear algebra: LU solves, one-sided Jacobi SVD and
//! shifted-QR eigenvalues. Sized for the n <= 13 matrices that show up in
//! path tracking and spectral analysis.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

#[allow(unused_imports)] // f64 math methods come from `Float` when built without std
use num_traits::{Float, Zero};

use crate::{C64, r};

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![C64::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = r(1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul_mat(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `self - shift * I`.
    pub fn shifted(&self, shift: C64) -> Mat {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] -= shift;
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dist(x: &[C64], y: &[C64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product `x^H y`.
pub fn dot_h(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Bilinear (non-conjugating) product `x^T y`.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// LU factorization with partial pivoting, stored compactly.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Mat,
    perm: Vec<usize>,
    sign_flips: usize,
}

impl Lu {
    /// Returns `None` when a pivot vanishes exactly or the matrix is non-finite.
    pub fn new(a: &Mat) -> Option<Lu> {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign_flips = 0;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if !(best > 0.0) || !best.is_finite() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign_flips += 1;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let t = lu[(k, j)];
                    lu[(i, j)] -= factor * t;
                }
            }
        }
        Some(Lu { lu, perm, sign_flips })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.rows;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.lu[(i, j)] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = self.lu[(i, j)] * x[j];
                x[i] -= t;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn det(&self) -> C64 {
        let prod: C64 = (0..self.lu.rows).map(|i| self.lu[(i, i)]).product();
        if self.sign_flips % 2 == 1 {
            -prod
        } else {
            prod
        }
    }
}

pub fn solve(a: &Mat, b: &[C64]) -> Option<Vec<C64>> {
    let x = Lu::new(a)?.solve(b);
    x.iter().all(|v| v.re.is_finite() && v.im.is_finite()).then_some(x)
}

pub fn det(a: &Mat) -> C64 {
    Lu::new(a).map(|lu| lu.det()).unwrap_or_else(C64::zero)
}

pub fn inverse(a: &Mat) -> Option<Mat> {
    let lu = Lu::new(a)?;
    let n = a.rows;
    let mut inv = Mat::zeros(n, n);
    for j in 0..n {
        let mut e = vec![C64::zero(); n];
        e[j] = r(1.0);
        let col = lu.solve(&e);
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Some(inv)
}

/// Singular value decomposition `A V = W`, with `W` holding the columns
/// `sigma_i u_i`. Singular values are sorted in decreasing order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub sigma: Vec<f64>,
    /// Right singular vectors as columns (n x n, unitary).
    pub v: Mat,
    /// `A v_i` for each column (m x n).
    pub w: Mat,
}

impl Svd {
    pub fn new(a: &Mat) -> Svd {
        let (m, n) = (a.rows, a.cols);
        let mut w = a.clone();
        let mut v = Mat::identity(n);
        for _sweep in 0..80 {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = C64::zero();
                    for i in 0..m {
                        let wp = w[(i, p)];
                        let wq = w[(i, q)];
                        alpha += wp.norm_sqr();
                        beta += wq.norm_sqr();
                        gamma += wp.conj() * wq;
                    }
                    let g = gamma.norm();
                    if g <= 1e-15 * (alpha * beta).sqrt() || g < 1e-300 {
                        continue;
                    }
                    rotated = true;
                    // Make the off-diagonal real by rephasing column q, then
                    // apply the real Hestenes rotation.
                    let phase = (gamma / g).conj();
                    let zeta = (beta - alpha) / (2.0 * g);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let cs = 1.0 / (1.0 + t * t).sqrt();
                    let sn = cs * t;
                    for i in 0..m {
                        let wp = w[(i, p)];
                        let wq = w[(i, q)] * phase;
                        w[(i, p)] = wp * cs - wq * sn;
                        w[(i, q)] = wp * sn + wq * cs;
                    }
                    for i in 0..n {
                        let vp = v[(i, p)];
                        let vq = v[(i, q)] * phase;
                        v[(i, p)] = vp * cs - vq * sn;
                        v[(i, q)] = vp * sn + vq * cs;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let norms: Vec<f64> = (0..n).map(|j| norm(&w.column(j))).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap_or(core::cmp::Ordering::Equal));
        let sigma = order.iter().map(|&j| norms[j]).collect();
        let v = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);
        let w = Mat::from_fn(m, n, |i, j| w[(i, order[j])]);
        Svd { sigma, v, w }
    }

    pub fn max_sigma(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// Smallest singular value of the (rows x cols) matrix; zero when the
    /// matrix has more columns than rows.
    pub fn min_sigma(&self) -> f64 {
        let k = self.w.rows.min(self.w.cols);
        if k < self.w.cols {
            0.0
        } else {
            self.sigma.last().copied().unwrap_or(0.0)
        }
    }

    /// Minimum-norm least-squares solution of `A x = b`, discarding singular
    /// values below `rel_tol * sigma_max`.
    pub fn solve(&self, b: &[C64], rel_tol: f64) -> Vec<C64> {
        let n = self.v.cols;
        let cutoff = rel_tol * self.max_sigma();
        let mut x = vec![C64::zero(); n];
        for j in 0..n {
            let s = self.sigma[j];
            if !(s > cutoff) || s == 0.0 {
                continue;
            }
            let coef = dot_h(&self.w.column(j), b) / (s * s);
            for i in 0..n {
                x[i] += self.v[(i, j)] * coef;
            }
        }
        x
    }

    /// Orthonormal basis of the numerical kernel: right singular vectors
    /// whose singular value is at most `abs_tol`.
    pub fn kernel(&self, abs_tol: f64) -> Vec<Vec<C64>> {
        (0..self.v.cols)
            .filter(|&j| self.sigma[j] <= abs_tol)
            .map(|j| self.v.column(j))
            .collect()
    }
}

pub fn min_singular_value(a: &Mat) -> f64 {
    Svd::new(a).min_sigma()
}

/// All eigenvalues of a square complex matrix by Householder reduction to
/// Hessenberg form followed by single-shift complex QR.
pub fn eigenvalues(a: &Mat) -> Vec<C64> {
    assert_eq!(a.rows, a.cols, "eigenvalues need a square matrix");
    let n = a.rows;
    if n == 0 {
        return Vec::new();
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    let mut eig = vec![C64::zero(); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let off = h[(l, l - 1)].norm();
            let scale = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if off <= f64::EPSILON * scale || off < 1e-300 {
                h[(l, l - 1)] = C64::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n {
            for i in 0..=hi {
                eig[i] = h[(i, i)];
            }
            break;
        }
        let shift = if iter % 11 == 10 {
            h[(hi, hi)] + r(h[(hi, hi - 1)].norm() * 0.75) + C64::new(0.0, h[(hi, hi - 1)].norm() * 0.4)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_step(&mut h, l, hi, shift);
    }
    eig
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let sq = disc.sqrt();
    let l1 = half_tr + sq;
    let l2 = half_tr - sq;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn qr_step(h: &mut Mat, lo: usize, hi: usize, shift: C64) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let a = h[(k, k)];
        let b = h[(k + 1, k)];
        let rr = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (cs, sn) = if rr == 0.0 { (r(1.0), C64::zero()) } else { (a / rr, b / rr) };
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = cs.conj() * x + sn.conj() * y;
            h[(k + 1, j)] = -sn * x + cs * y;
        }
        rots.push((cs, sn));
    }
    for (idx, k) in (lo..hi).enumerate() {
        let (cs, sn) = rots[idx];
        for i in lo..=(k + 1).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * cs + y * sn;
            h[(i, k + 1)] = -x * sn.conj() + y * cs.conj();
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

fn hessenberg(h: &mut Mat) {
    let n = h.rows;
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xn = norm(&x);
        if xn == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { r(1.0) };
        let mut v = x.clone();
        v[0] += phase * xn;
        let vn = norm(&v);
        if vn == 0.0 {
            continue;
        }
        for e in v.iter_mut() {
            *e /= vn;
        }
        // H <- (I - 2 v v^H) H
        for j in 0..n {
            let s: C64 = (0..v.len()).map(|t| v[t].conj() * h[(k + 1 + t, j)]).sum();
            for t in 0..v.len() {
                h[(k + 1 + t, j)] -= v[t] * s * 2.0;
            }
        }
        // H <- H (I - 2 v v^H)
        for i in 0..n {
            let s: C64 = (0..v.len()).map(|t| h[(i, k + 1 + t)] * v[t]).sum();
            for t in 0..v.len() {
                h[(i, k + 1 + t)] -= s * v[t].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::zero();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    fn sample() -> Mat {
        Mat::from_fn(4, 4, |i, j| c(((i * 7 + j * 3) % 5) as f64 * 0.3 - 0.4 + if i == j { 2.0 } else { 0.0 }, ((i * j) % 3) as f64 * 0.25 - 0.2))
    }

    #[test]
    fn lu_solves_and_inverts() {
        let a = sample();
        let b: Vec<C64> = (0..4).map(|i| c(i as f64, 1.0)).collect();
        let x = solve(&a, &b).unwrap();
        assert!(dist(&a.mul_vec(&x), &b) < 1e-12);
        let inv = inverse(&a).unwrap();
        assert!(a.mul_mat(&inv).sub(&Mat::identity(4)).max_abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_has_no_lu() {
        let a = Mat::from_fn(2, 2, |_, _| r(1.0));
        assert!(Lu::new(&a).map(|lu| lu.det().norm() < 1e-14).unwrap_or(true));
        assert!(Lu::new(&Mat::zeros(3, 3)).is_none());
    }

    #[test]
    fn svd_reconstructs() {
        let a = sample();
        let svd = Svd::new(&a);
        assert!(a.mul_mat(&svd.v).sub(&svd.w).max_abs() < 1e-12);
        let vhv = svd.v.transpose().mul_mat(&Mat::from_fn(4, 4, |i, j| svd.v[(i, j)].conj()));
        assert!(vhv.sub(&Mat::identity(4)).max_abs() < 1e-12);
        for j in 0..4 {
            for k in j + 1..4 {
                assert!(dot_h(&svd.w.column(j), &svd.w.column(k)).norm() < 1e-10);
            }
        }
        assert!(svd.sigma.windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn svd_kernel_of_rank_one() {
        let u = [c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0)];
        let a = Mat::from_fn(3, 3, |i, j| u[i] * u[j].conj());
        let svd = Svd::new(&a);
        let ker = svd.kernel(1e-10);
        assert_eq!(ker.len(), 2);
        for z in &ker {
            assert!(norm(&a.mul_vec(z)) < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_of_triangular_and_rotation() {
        let a = Mat::from_fn(3, 3, |i, j| if j >= i { c((i + 1) as f64, j as f64) } else { r(0.0) });
        let mut ev = eigenvalues(&a);
        ev.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        for (k, e) in ev.iter().enumerate() {
            assert!((e - c((k + 1) as f64, k as f64)).norm() < 1e-12);
        }
        let rot = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => r(-1.0),
            (1, 0) => r(1.0),
            _ => r(0.0),
        });
        let ev = eigenvalues(&rot);
        assert!(ev.iter().any(|e| (e - c(0.0, 1.0)).norm() < 1e-12));
        assert!(ev.iter().any(|e| (e - c(0.0, -1.0)).norm() < 1e-12));
    }

    #[test]
    fn eigenvalue_sum_is_trace() {
        let a = sample();
        let s: C64 = eigenvalues(&a).into_iter().sum();
        assert!((s - a.trace()).norm() < 1e-10);
        let p: C64 = eigenvalues(&a).into_iter().product();
        assert!((p - det(&a)).norm() < 1e-9 * (1.0 + det(&a).norm()));
    }
}
