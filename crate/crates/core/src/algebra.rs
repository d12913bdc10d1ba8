//! Commutative algebras given by structure constants.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Sub};

use num_traits::Zero;

use crate::linalg::{self, Mat, Svd};
use crate::{C64, Error, Result, poly, r};

/// Largest tolerated |c[i][j][k] - c[j][i][k]| relative to the entry size.
pub const COMMUTATIVITY_TOL: f64 = 1e-12;
/// Residual below which a least-squares unit candidate is accepted.
pub const UNIT_TOL: f64 = 1e-10;

/// Coordinate vector of an algebra element in the fixed basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Element(Vec<C64>);

impl Element {
    pub fn new(coords: Vec<C64>) -> Self {
        Element(coords)
    }

    pub fn zeros(n: usize) -> Self {
        Element(vec![C64::zero(); n])
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = vec![C64::zero(); n];
        v[i] = r(1.0);
        Element(v)
    }

    pub fn from_real(coords: &[f64]) -> Self {
        Element(coords.iter().map(|&x| r(x)).collect())
    }

    pub fn coords(&self) -> &[C64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<C64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.0)
    }

    pub fn dist(&self, other: &Element) -> f64 {
        linalg::dist(&self.0, &other.0)
    }

    pub fn scale(&self, s: C64) -> Element {
        Element(self.0.iter().map(|v| v * s).collect())
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    /// True when every imaginary part is below `tol * (1 + |x|)`.
    pub fn is_real(&self, tol: f64) -> bool {
        let bound = tol * (1.0 + self.norm());
        self.0.iter().all(|v| v.im.abs() <= bound)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        Element(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        Element(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// Monic characteristic polynomial `p(t) = det(tI - L_x)`, ascending order.
///
/// This differs from `det(L_x - tI)` by the factor `(-1)^n`; every identity
/// built on top of it only uses ratios of values of the same polynomial, so
/// the sign cancels.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    coeffs: Vec<C64>,
}

impl CharPoly {
    /// Wraps ascending coefficients; the leading one must be exactly 1.
    pub fn from_coeffs(coeffs: Vec<C64>) -> Result<Self> {
        match coeffs.last() {
            Some(lead) if *lead == r(1.0) => Ok(CharPoly { coeffs }),
            _ => Err(Error::InvalidParameter(String::from("characteristic polynomial must be monic"))),
        }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, t: C64) -> C64 {
        poly::eval(&self.coeffs, t)
    }

    /// Value of the `k`-th derivative at `t`.
    pub fn derivative_at(&self, k: usize, t: C64) -> C64 {
        poly::eval(&poly::nth_derivative(&self.coeffs, k), t)
    }
}

/// Finite-dimensional commutative algebra, `e_i e_j = sum_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Algebra {
    dim: usize,
    tensor: Vec<C64>,
    label: Option<String>,
}

impl Algebra {
    /// Builds an algebra from a flat `n^3` tensor indexed `[(i * n + j) * n + k]`.
    ///
    /// The tensor is symmetrized in `(i, j)`; an asymmetry above
    /// [`COMMUTATIVITY_TOL`] is rejected.
    pub fn new(dim: usize, tensor: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyAlgebra);
        }
        if tensor.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim * dim, found: tensor.len() });
        }
        if tensor.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        let idx = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
        let mut sym = tensor.clone();
        for i in 0..dim {
            for j in i + 1..dim {
                for k in 0..dim {
                    let a = tensor[idx(i, j, k)];
                    let b = tensor[idx(j, i, k)];
                    let asym = (a - b).norm();
                    if asym > COMMUTATIVITY_TOL * (1.0 + a.norm().max(b.norm())) {
                        return Err(Error::NonCommutative { i, j, k, asymmetry: asym });
                    }
                    let m = (a + b) * 0.5;
                    sym[idx(i, j, k)] = m;
                    sym[idx(j, i, k)] = m;
                }
            }
        }
        Ok(Algebra { dim, tensor: sym, label: None })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> C64) -> Result<Self> {
        let mut t = Vec::with_capacity(dim * dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    t.push(f(i, j, k));
                }
            }
        }
        Algebra::new(dim, t)
    }

    /// Builds an algebra from the products of basis vectors with `i <= j`.
    pub fn from_products(dim: usize, mut product: impl FnMut(usize, usize) -> Vec<C64>) -> Result<Self> {
        let mut t = vec![C64::zero(); dim * dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = product(i, j);
                if v.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
                }
                for k in 0..dim {
                    t[(i * dim + j) * dim + k] = v[k];
                    t[(j * dim + i) * dim + k] = v[k];
                }
            }
        }
        Algebra::new(dim, t)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn tensor(&self) -> &[C64] {
        &self.tensor
    }

    pub fn structure(&self, i: usize, j: usize, k: usize) -> C64 {
        self.tensor[(i * self.dim + j) * self.dim + k]
    }

    fn check(&self, x: &Element) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.dim() });
        }
        Ok(())
    }

    pub(crate) fn product_slice(&self, x: &[C64], y: &[C64]) -> Vec<C64> {
        let n = self.dim;
        let mut out = vec![C64::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w.is_zero() {
                    continue;
                }
                let base = (i * n + j) * n;
                for k in 0..n {
                    out[k] += w * self.tensor[base + k];
                }
            }
        }
        out
    }

    /// Matrix of `y -> x y`: entry (k, j) is `sum_i x_i c[i][j][k]`.
    pub(crate) fn left_mult_slice(&self, x: &[C64]) -> Mat {
        let n = self.dim;
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                let base = (i * n + j) * n;
                for k in 0..n {
                    m[(k, j)] += x[i] * self.tensor[base + k];
                }
            }
        }
        m
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check(x)?;
        self.check(y)?;
        Ok(Element(self.product_slice(x.coords(), y.coords())))
    }

    pub fn square(&self, x: &Element) -> Result<Element> {
        self.multiply(x, x)
    }

    /// `|x^2 - x|`.
    pub fn idempotent_residual(&self, x: &Element) -> Result<f64> {
        let sq = self.square(x)?;
        Ok(sq.dist(x))
    }

    /// Matrix of the multiplication operator `L_x`; it is half the Jacobian
    /// of the squaring map at `x`.
    pub fn left_mult_matrix(&self, x: &Element) -> Result<Mat> {
        self.check(x)?;
        Ok(self.left_mult_slice(x.coords()))
    }

    /// Characteristic polynomial of `L_x` by the Faddeev–LeVerrier trace
    /// recursion.
    pub fn char_poly(&self, x: &Element) -> Result<CharPoly> {
        let l = self.left_mult_matrix(x)?;
        Ok(CharPoly { coeffs: faddeev_leverrier(&l) })
    }

    /// Solves `e e_j = e_j` for all `j` in the least-squares sense; returns
    /// the solution when its residual is below [`UNIT_TOL`].
    pub fn find_unit(&self) -> Option<Element> {
        let n = self.dim;
        // Unknown e: row (j, k) reads sum_i e_i c[i][j][k] = delta_jk.
        let m = Mat::from_fn(n * n, n, |row, i| self.structure(i, row / n, row % n));
        let rhs: Vec<C64> = (0..n * n).map(|row| if row / n == row % n { r(1.0) } else { C64::zero() }).collect();
        let svd = Svd::new(&m);
        let e = svd.solve(&rhs, 1e-13);
        let resid = linalg::dist(&m.mul_vec(&e), &rhs);
        (resid < UNIT_TOL).then_some(Element(e))
    }

    /// Residual of the unit identity `e e_j = e_j`, maximised over `j`.
    pub fn unit_residual(&self, e: &Element) -> Result<f64> {
        self.check(e)?;
        let n = self.dim;
        let l = self.left_mult_slice(e.coords());
        Ok(l.sub(&Mat::identity(n)).max_abs())
    }

    /// The conjugate idempotent `e - c` of `c` with respect to the unit `e`.
    pub fn conjugate_idempotent(&self, e: &Element, c: &Element, tol: f64) -> Result<Element> {
        self.check(e)?;
        self.check(c)?;
        if self.unit_residual(e)? > tol {
            return Err(Error::NotUnital);
        }
        let residual = self.idempotent_residual(c)?;
        if residual > tol * (1.0 + c.norm()) {
            return Err(Error::NotIdempotent { residual });
        }
        Ok(e - c)
    }

    /// Block-diagonal direct sum; the basis of `self` comes first.
    pub fn direct_sum(&self, other: &Algebra) -> Algebra {
        let (a, b) = (self.dim, other.dim);
        let n = a + b;
        let mut t = vec![C64::zero(); n * n * n];
        for i in 0..a {
            for j in 0..a {
                for k in 0..a {
                    t[(i * n + j) * n + k] = self.structure(i, j, k);
                }
            }
        }
        for i in 0..b {
            for j in 0..b {
                for k in 0..b {
                    t[((a + i) * n + a + j) * n + a + k] = other.structure(i, j, k);
                }
            }
        }
        let label = match (self.label(), other.label()) {
            (Some(x), Some(y)) => Some(format!("{x} (+) {y}")),
            _ => None,
        };
        Algebra { dim: n, tensor: t, label }
    }

    /// True when every structure constant is below `tol` in modulus.
    pub fn is_zero_algebra(&self, tol: f64) -> bool {
        self.tensor.iter().all(|v| v.norm() <= tol)
    }
}

pub(crate) fn faddeev_leverrier(a: &Mat) -> Vec<C64> {
    let n = a.rows();
    let mut coeffs = vec![C64::zero(); n + 1];
    coeffs[n] = r(1.0);
    let mut m = Mat::zeros(n, n);
    for k in 1..=n {
        let mut next = a.mul_mat(&m);
        for i in 0..n {
            next[(i, i)] += coeffs[n - k + 1];
        }
        m = next;
        coeffs[n - k] = -a.mul_mat(&m).trace() / k as f64;
    }
    coeffs
}

#[cfg(test)]
#[allow(clippy::identity_op, clippy::erasing_op)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::c;

    #[test]
    fn rejects_asymmetric_tensor() {
        let mut t = vec![C64::zero(); 8];
        t[(0 * 2 + 1) * 2] = r(1.0);
        assert!(matches!(Algebra::new(2, t), Err(Error::NonCommutative { .. })));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert_eq!(Algebra::new(0, vec![]), Err(Error::EmptyAlgebra));
        assert!(matches!(Algebra::new(2, vec![C64::zero(); 7]), Err(Error::DimensionMismatch { .. })));
        let mut t = vec![C64::zero(); 1];
        t[0] = r(f64::NAN);
        assert_eq!(Algebra::new(1, t), Err(Error::NonFinite));
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let mut t = vec![C64::zero(); 8];
        t[(0 * 2 + 1) * 2] = r(1.0);
        t[(1 * 2 + 0) * 2] = r(1.0 + 1e-14);
        let a = Algebra::new(2, t).unwrap();
        assert_eq!(a.structure(0, 1, 0), a.structure(1, 0, 0));
    }

    #[test]
    fn matsuo_product_of_basis() {
        let a = catalog::matsuo_3c(r(0.3));
        let p = a.multiply(&Element::basis(3, 0), &Element::basis(3, 1)).unwrap();
        let expect = [0.15, 0.15, -0.15];
        for (v, e) in p.coords().iter().zip(expect) {
            assert!((v - r(e)).norm() < 1e-15);
        }
    }

    #[test]
    fn product_algebra_multiplies_coordinatewise() {
        let a = catalog::cubic_u1(3).unwrap();
        let p = a.multiply(&Element::from_real(&[1.0, 2.0, 3.0]), &Element::from_real(&[4.0, 5.0, 6.0])).unwrap();
        assert_eq!(p, Element::from_real(&[4.0, 10.0, 18.0]));
        let z = a.multiply(&Element::zeros(3), &Element::from_real(&[4.0, 5.0, 6.0])).unwrap();
        assert!(z.is_zero(0.0));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = catalog::cubic_u1(3).unwrap();
        assert!(matches!(
            a.multiply(&Element::zeros(2), &Element::zeros(3)),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
        assert!(a.char_poly(&Element::zeros(4)).is_err());
    }

    #[test]
    fn left_mult_matrices() {
        let u = catalog::cubic_u1(2).unwrap();
        let l = u.left_mult_matrix(&Element::basis(2, 0)).unwrap();
        assert_eq!(l, Mat::from_fn(2, 2, |i, j| if i == 0 && j == 0 { r(1.0) } else { C64::zero() }));

        let m = catalog::matsuo_3c(r(0.3));
        let e = m.find_unit().unwrap();
        assert!(m.left_mult_matrix(&e).unwrap().sub(&Mat::identity(3)).max_abs() < 1e-12);
        let l1 = m.left_mult_matrix(&Element::basis(3, 0)).unwrap();
        let col = l1.column(1);
        for (v, e) in col.iter().zip([0.15, 0.15, -0.15]) {
            assert!((v - r(e)).norm() < 1e-15);
        }
    }

    #[test]
    fn char_poly_of_zero_unit_and_basis() {
        let m = catalog::matsuo_3c(r(0.3));
        let p0 = m.char_poly(&Element::zeros(3)).unwrap();
        assert_eq!(p0.coeffs(), &[C64::zero(), C64::zero(), C64::zero(), r(1.0)]);
        let e = m.find_unit().unwrap();
        let pe = m.char_poly(&e).unwrap();
        for (a, b) in pe.coeffs().iter().zip([-1.0, 3.0, -3.0, 1.0]) {
            assert!((a - r(b)).norm() < 1e-12);
        }
        let p1 = m.char_poly(&Element::basis(3, 0)).unwrap();
        for root in [0.0, 0.3, 1.0] {
            assert!(p1.eval(r(root)).norm() < 1e-14);
        }
    }

    #[test]
    fn char_poly_vanishes_on_eigenvalues() {
        let a = catalog::random_algebra(4, 11);
        let x = Element::new(vec![c(0.3, -0.1), c(1.0, 0.2), c(-0.5, 0.0), c(0.1, 0.9)]);
        let p = a.char_poly(&x).unwrap();
        for ev in linalg::eigenvalues(&a.left_mult_matrix(&x).unwrap()) {
            assert!(p.eval(ev).norm() < 1e-8);
        }
    }

    #[test]
    fn units() {
        let m = catalog::matsuo_3c(r(0.3));
        let e = m.find_unit().unwrap();
        for v in e.coords() {
            assert!((v - r(1.0 / 1.3)).norm() < 1e-12);
        }
        let u = catalog::cubic_u1(3).unwrap().find_unit().unwrap();
        assert!(u.dist(&Element::from_real(&[1.0, 1.0, 1.0])) < 1e-12);
        assert!(catalog::constant_spectrum_2d().find_unit().is_none());
    }

    #[test]
    fn conjugates() {
        let u = catalog::cubic_u1(3).unwrap();
        let e = u.find_unit().unwrap();
        let c = Element::from_real(&[1.0, 1.0, 0.0]);
        let cb = u.conjugate_idempotent(&e, &c, 1e-10).unwrap();
        assert!(cb.dist(&Element::from_real(&[0.0, 0.0, 1.0])) < 1e-12);
        assert!(u.conjugate_idempotent(&e, &cb, 1e-10).unwrap().dist(&c) < 1e-12);
        assert_eq!(u.conjugate_idempotent(&e, &Element::zeros(3), 1e-10).unwrap(), e);
        assert!(matches!(
            u.conjugate_idempotent(&e, &Element::from_real(&[0.5, 0.0, 0.0]), 1e-10),
            Err(Error::NotIdempotent { .. })
        ));
        assert_eq!(u.conjugate_idempotent(&c, &c, 1e-10), Err(Error::NotUnital));
    }

    #[test]
    fn direct_sum_dimensions() {
        let a = catalog::two_dim_from_pair(r(0.2), r(0.7));
        let b = catalog::matsuo_3c(r(0.3));
        assert_eq!(a.direct_sum(&b).dim(), 5);
        let one = catalog::cubic_u1(1).unwrap();
        assert_eq!(one.direct_sum(&one).tensor(), catalog::cubic_u1(2).unwrap().tensor());
    }
}
