//! Spectral syzygies of generic algebras.
//!
//! Every identity is written with the monic `p_c(t) = det(tI - L_c)`. The
//! determinant convention `det(L_c - tI)` differs by `(-1)^n` for every
//! idempotent at once, and each identity only involves ratios
//! `p_c(..)/p_c(1/2)` of the same idempotent or a global zero test, so the
//! sign never matters.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_traits::{Float, Zero};

use crate::algebra::Element;
use crate::linalg;
use crate::solve::IdempotentSet;
use crate::spectral::{self, GenericityKind, IdempotentRecord};
use crate::{C64, Error, Result, poly, r};

/// `p_c(1/2)` below this contradicts genericity.
pub const DENOMINATOR_TOL: f64 = 1e-12;

/// 20 points on the unit circle (offset by half a step so that they do not
/// repeat the real samples) plus `0, 1, 2, -1`.
pub fn default_t_samples() -> Vec<C64> {
    let mut out: Vec<C64> = (0..20).map(|k| C64::from_polar(1.0, TAU * (k as f64 + 0.5) / 20.0)).collect();
    out.extend([r(0.0), r(1.0), r(2.0), r(-1.0)]);
    out
}

pub fn default_s_samples() -> Vec<C64> {
    vec![r(0.0), r(0.1), r(0.25), r(0.5), r(1.0), r(2.0), C64::new(0.0, 1.0), C64::new(0.7, -0.3)]
}

fn two_pow(n: usize) -> f64 {
    Float::powi(2.0, n as i32)
}

/// Records of a generic set paired with `p_c(1/2)`.
fn weighted(set: &IdempotentSet) -> Result<Vec<(&IdempotentRecord, C64)>> {
    let verdict = spectral::classify_genericity(set);
    if verdict.kind != GenericityKind::Generic {
        return Err(Error::NotGeneric(verdict.kind));
    }
    set.idempotents
        .iter()
        .map(|rec| {
            let d = rec.p_half();
            if d.norm() < DENOMINATOR_TOL {
                Err(Error::NearZeroDenominator { value: d.norm() })
            } else {
                Ok((rec, d))
            }
        })
        .collect()
}

/// `max_t |sum_{c in Idm_0} p_c(t)/p_c(1/2) - 2^n|`.
pub fn principal_syzygy(set: &IdempotentSet, t_samples: &[C64]) -> Result<f64> {
    let w = weighted(set)?;
    let target = two_pow(set.dim());
    Ok(t_samples
        .iter()
        .map(|&t| {
            let sum: C64 = w.iter().map(|(rec, d)| rec.charpoly.eval(t) / d).sum();
            (sum - target).norm()
        })
        .fold(0.0, f64::max))
}

/// Coefficients of `sum_{c in Idm_0} p_c(t)/p_c(1/2)`, summed exactly in
/// coefficient space; the identity says this is the constant `2^n`.
pub fn principal_coefficients(set: &IdempotentSet) -> Result<Vec<C64>> {
    let w = weighted(set)?;
    let mut acc = vec![C64::zero(); set.dim() + 1];
    for (rec, d) in &w {
        for (a, b) in acc.iter_mut().zip(rec.charpoly.coeffs()) {
            *a += b / d;
        }
    }
    Ok(acc)
}

/// Largest deviation of [`principal_coefficients`] from `(2^n, 0, ..., 0)`.
pub fn principal_coefficient_residual(set: &IdempotentSet) -> Result<f64> {
    let coeffs = principal_coefficients(set)?;
    let target = two_pow(set.dim());
    Ok(coeffs
        .iter()
        .enumerate()
        .map(|(k, v)| if k == 0 { (v - target).norm() } else { v.norm() })
        .fold(0.0, f64::max))
}

/// `|sum_{c in Idm_0} p_c^(k)(1/2)/p_c(1/2)|` for `k = 1..n`.
pub fn derivative_syzygies(set: &IdempotentSet) -> Result<Vec<f64>> {
    let w = weighted(set)?;
    Ok((1..=set.dim())
        .map(|k| w.iter().map(|(rec, d)| rec.charpoly.derivative_at(k, r(0.5)) / d).sum::<C64>().norm())
        .collect())
}

/// `|sum_c c / p_c(1/2)|` (the zero idempotent contributes nothing).
pub fn vector_syzygy(set: &IdempotentSet) -> Result<f64> {
    let w = weighted(set)?;
    let mut acc = vec![C64::zero(); set.dim()];
    for (rec, d) in &w {
        for (a, x) in acc.iter_mut().zip(rec.point.coords()) {
            *a += x / d;
        }
    }
    Ok(linalg::norm(&acc))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: C64,
    /// One exponent per coordinate.
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn eval(&self, x: &[C64]) -> C64 {
        self.exponents.iter().zip(x).fold(self.coeff, |acc, (&e, &v)| acc * v.powu(e))
    }
}

/// Polynomial map `C^n -> C^s`, one sparse polynomial per output coordinate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolyMap {
    pub components: Vec<Vec<Monomial>>,
}

impl PolyMap {
    pub fn constant(value: C64, n: usize) -> Self {
        PolyMap { components: vec![vec![Monomial { coeff: value, exponents: vec![0; n] }]] }
    }

    pub fn identity(n: usize) -> Self {
        PolyMap {
            components: (0..n)
                .map(|i| {
                    let mut e = vec![0; n];
                    e[i] = 1;
                    vec![Monomial { coeff: r(1.0), exponents: e }]
                })
                .collect(),
        }
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().flatten().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[C64]) -> Vec<C64> {
        self.components.iter().map(|comp| comp.iter().map(|m| m.eval(x)).sum()).collect()
    }
}

/// `|sum_{c in Idm_0} H(c)/p_c(1/2)|` for a map of degree at most `n - 1`.
pub fn general_syzygy(set: &IdempotentSet, h: &PolyMap) -> Result<f64> {
    let n = set.dim();
    let degree = h.degree() as usize;
    if degree + 1 > n {
        return Err(Error::DegreeTooHigh { degree, max: n - 1 });
    }
    if let Some(m) = h.components.iter().flatten().find(|m| m.exponents.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: m.exponents.len() });
    }
    let w = weighted(set)?;
    let mut acc = vec![C64::zero(); h.components.len()];
    for (rec, d) in &w {
        for (a, v) in acc.iter_mut().zip(h.eval(rec.point.coords())) {
            *a += v / d;
        }
    }
    Ok(linalg::norm(&acc))
}

fn remainder_tol(coeffs: &[C64]) -> f64 {
    1e-8 * (1.0 + coeffs.iter().map(|v| v.norm()).sum::<f64>())
}

/// `p / (t - root)`, insisting on a zero remainder.
fn divide_exact(coeffs: &[C64], root: C64) -> Result<Vec<C64>> {
    let (q, rem) = poly::deflate(coeffs, root);
    if rem.norm() > remainder_tol(coeffs) {
        return Err(Error::DivisionRemainder { remainder: rem.norm() });
    }
    Ok(q)
}

/// Residuals over the nonzero idempotents:
/// `max_t |sum p_c(t)/p_c(1/2) - 2^n (1 - t^n)|` and, with
/// `q_c = p_c/(t - 1)`, `max_t |sum q_c(t)/q_c(1/2) - 2^(n-1)(1 + ... + t^(n-1))|`.
pub fn idemm_syzygies(set: &IdempotentSet, t_samples: &[C64]) -> Result<(f64, f64)> {
    let n = set.dim();
    let w = weighted(set)?;
    let nonzero: Vec<_> = w.iter().filter(|(rec, _)| !rec.is_zero()).collect();
    let mut quotients = Vec::with_capacity(nonzero.len());
    for (rec, _) in &nonzero {
        let q = divide_exact(rec.charpoly.coeffs(), r(1.0))?;
        let qh = poly::eval(&q, r(0.5));
        quotients.push((q, qh));
    }
    let (mut first, mut second) = (0.0f64, 0.0f64);
    for &t in t_samples {
        let s1: C64 = nonzero.iter().map(|(rec, d)| rec.charpoly.eval(t) / d).sum();
        let rhs1 = (r(1.0) - t.powu(n as u32)) * two_pow(n);
        first = first.max((s1 - rhs1).norm());
        let s2: C64 = quotients.iter().map(|(q, qh)| poly::eval(q, t) / qh).sum();
        let geometric: C64 = (0..n).map(|k| t.powu(k as u32)).sum();
        second = second.max((s2 - geometric * two_pow(n - 1)).norm());
    }
    Ok((first, second))
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitalSyzygies {
    /// `max_s |sum_{Idm+} (p_c(1/2+s) + p_c(1/2-s))/p_c(1/2) - 2^n|`.
    pub p1_max_residual: f64,
    /// Dimension 4 only: `|sum 1/q_c(1/2) - 4|` over the seven
    /// representatives, `q_c = p_c / (t (t - 1))`.
    pub half41_residual: Option<f64>,
    /// Indices (into `set.idempotents`) of one member of each conjugate
    /// pair `(c, e - c)`, the unit and zero excluded.
    pub representatives: Vec<usize>,
    pub partners: Vec<usize>,
    pub s_samples: Vec<C64>,
}

/// Pairs every idempotent other than 0 and `e` with its conjugate `e - c`.
pub fn conjugate_pairs(set: &IdempotentSet, e: &Element) -> Result<Vec<(usize, usize)>> {
    let tol = set.config.dedup_tol;
    let close = |x: &Element, y: &Element| x.dist(y) <= tol * (1.0 + x.norm().max(y.norm()));
    let mut taken = vec![false; set.count()];
    let mut pairs = Vec::new();
    for (i, rec) in set.idempotents.iter().enumerate() {
        if taken[i] || rec.is_zero() || close(&rec.point, e) {
            continue;
        }
        let bar = e - &rec.point;
        let partner = (0..set.count()).find(|&j| j != i && !taken[j] && close(&set.idempotents[j].point, &bar));
        let Some(j) = partner else { return Err(Error::UnpairedIdempotent { index: i }) };
        taken[i] = true;
        taken[j] = true;
        pairs.push((i, j));
    }
    Ok(pairs)
}

pub fn unital_syzygies(set: &IdempotentSet, e: &Element, s_samples: &[C64]) -> Result<UnitalSyzygies> {
    let n = set.dim();
    let w = weighted(set)?;
    if set.algebra.unit_residual(e)? > 1e-8 {
        return Err(Error::NotUnital);
    }
    let pairs = conjugate_pairs(set, e)?;
    let mut plus: Vec<usize> = set.idempotents.iter().enumerate().filter(|(_, rec)| rec.is_zero()).map(|(i, _)| i).collect();
    plus.extend(pairs.iter().map(|p| p.0));
    let half = r(0.5);
    let p1 = s_samples
        .iter()
        .map(|&s| {
            let sum: C64 = plus
                .iter()
                .map(|&i| {
                    let (rec, d) = &w[i];
                    (rec.charpoly.eval(half + s) + rec.charpoly.eval(half - s)) / d
                })
                .sum();
            (sum - two_pow(n)).norm()
        })
        .fold(0.0, f64::max);

    let half41 = if n == 4 {
        let mut sum = C64::zero();
        for &(i, _) in &pairs {
            let p = set.idempotents[i].charpoly.coeffs();
            let q = divide_exact(&divide_exact(p, r(0.0))?, r(1.0))?;
            sum += poly::eval(&q, half).inv();
        }
        Some((sum - 4.0).norm())
    } else {
        None
    };

    Ok(UnitalSyzygies {
        p1_max_residual: p1,
        half41_residual: half41,
        representatives: pairs.iter().map(|p| p.0).collect(),
        partners: pairs.iter().map(|p| p.1).collect(),
        s_samples: s_samples.to_vec(),
    })
}

/// `4 l1 l2 l3 - l1 - l2 - l3 + 1`, which vanishes on the three nontrivial
/// eigenvalues of a generic two-dimensional algebra.
pub fn two_dim_syzygy(l1: C64, l2: C64, l3: C64) -> C64 {
    l1 * l2 * l3 * 4.0 - l1 - l2 - l3 + 1.0
}

/// `sum 1/(1 - 2 l_i)`, equal to 1 in the generic case; `None` at the pole
/// `l_i = 1/2`.
pub fn two_dim_companion(l1: C64, l2: C64, l3: C64) -> Option<C64> {
    let mut sum = C64::zero();
    for l in [l1, l2, l3] {
        let d = r(1.0) - l * 2.0;
        if d.norm() < 1e-12 {
            return None;
        }
        sum += d.inv();
    }
    Some(sum)
}

/// The eigenvalue other than 1 of each nonzero idempotent of a
/// two-dimensional algebra.
pub fn two_dim_eigenvalues(set: &IdempotentSet) -> Result<Vec<C64>> {
    if set.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: set.dim() });
    }
    Ok(set
        .nonzero()
        .map(|rec| {
            // p_c(t) = (t - 1)(t - l) = t^2 - (1 + l) t + l.
            -rec.charpoly.coeffs()[1] - 1.0
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyzygyReport {
    pub principal_max_residual: f64,
    pub principal_coefficient_residual: f64,
    pub derivative_residuals: Vec<f64>,
    pub vector_residual: f64,
    pub idemm_max_residual: f64,
    pub idemm1_max_residual: f64,
    pub unital: Option<UnitalSyzygies>,
    pub samples: Vec<C64>,
}

impl SyzygyReport {
    /// Largest residual of all identities.
    pub fn max_residual(&self) -> f64 {
        let mut m = self
            .principal_max_residual
            .max(self.vector_residual)
            .max(self.idemm_max_residual)
            .max(self.idemm1_max_residual)
            .max(self.derivative_residuals.iter().copied().fold(0.0, f64::max));
        if let Some(u) = &self.unital {
            m = m.max(u.p1_max_residual).max(u.half41_residual.unwrap_or(0.0));
        }
        m
    }
}

/// All identities on a generic set; unital ones when the algebra has a unit.
pub fn syzygy_report(set: &IdempotentSet, t_samples: &[C64]) -> Result<SyzygyReport> {
    let (idemm, idemm1) = idemm_syzygies(set, t_samples)?;
    let unital = match set.algebra.find_unit() {
        Some(e) => Some(unital_syzygies(set, &e, &default_s_samples())?),
        None => None,
    };
    Ok(SyzygyReport {
        principal_max_residual: principal_syzygy(set, t_samples)?,
        principal_coefficient_residual: principal_coefficient_residual(set)?,
        derivative_residuals: derivative_syzygies(set)?,
        vector_residual: vector_syzygy(set)?,
        idemm_max_residual: idemm,
        idemm1_max_residual: idemm1,
        unital,
        samples: t_samples.to_vec(),
    })
}

/// Short human-readable list of residuals.
pub fn describe(report: &SyzygyReport) -> alloc::string::String {
    let ders: Vec<alloc::string::String> = report.derivative_residuals.iter().map(|d| format!("{d:.2e}")).collect();
    format!(
        "principal {:.2e}, derivatives [{}], vector {:.2e}, idemm {:.2e}, idemm1 {:.2e}",
        report.principal_max_residual,
        ders.join(", "),
        report.vector_residual,
        report.idemm_max_residual,
        report.idemm1_max_residual
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::{SolveConfig, solve_idempotents};
    use crate::{c, catalog};

    fn solved(a: &crate::Algebra) -> IdempotentSet {
        solve_idempotents(a, &SolveConfig::with_seed(2)).unwrap()
    }

    #[test]
    fn matsuo_identities() {
        let set = solved(&catalog::matsuo_3c(r(0.3)));
        let t = default_t_samples();
        assert_eq!(t.len(), 24);
        assert!(principal_syzygy(&set, &t).unwrap() < 1e-8);
        assert!(principal_syzygy(&set, &[r(0.5)]).unwrap() < 1e-12);
        assert!(derivative_syzygies(&set).unwrap().iter().all(|&d| d < 1e-8));
        assert!(vector_syzygy(&set).unwrap() < 1e-8);
        let (a, b) = idemm_syzygies(&set, &t).unwrap();
        assert!(a < 1e-8 && b < 1e-8);
        let (a, b) = idemm_syzygies(&set, &[r(1.0), r(0.5)]).unwrap();
        assert!(a < 1e-12 && b < 1e-9);
        assert!(principal_coefficient_residual(&set).unwrap() < 1e-8);
    }

    #[test]
    fn general_maps() {
        let set = solved(&catalog::matsuo_3c(r(0.3)));
        assert!(general_syzygy(&set, &PolyMap::constant(r(1.0), 3)).unwrap() < 1e-8);
        let id = general_syzygy(&set, &PolyMap::identity(3)).unwrap();
        assert!((id - vector_syzygy(&set).unwrap()).abs() < 1e-14);
        let cubic = PolyMap { components: vec![vec![Monomial { coeff: r(1.0), exponents: vec![3, 0, 0] }]] };
        assert_eq!(general_syzygy(&set, &cubic), Err(Error::DegreeTooHigh { degree: 3, max: 2 }));
    }

    #[test]
    fn vector_identity_on_square() {
        // p_c(1/2) for the vertices (1,0), (0,1), (1,1) of u1(2): -1/4, -1/4, 1/4.
        let set = solved(&catalog::cubic_u1(2).unwrap());
        assert!(vector_syzygy(&set).unwrap() < 1e-10);
    }

    #[test]
    fn refuses_nongeneric_sets() {
        let set = solved(&catalog::two_dim_from_pair(r(1.0), r(0.25)));
        assert_eq!(principal_syzygy(&set, &[r(0.0)]), Err(Error::NotGeneric(GenericityKind::NongenericNilpotent)));
    }

    #[test]
    fn unital_u1_four() {
        let a = catalog::cubic_u1(4).unwrap();
        let set = solved(&a);
        let e = a.find_unit().unwrap();
        let u = unital_syzygies(&set, &e, &default_s_samples()).unwrap();
        assert_eq!(u.representatives.len(), 7);
        assert!(u.half41_residual.unwrap() < 1e-9);
        assert!(u.p1_max_residual < 1e-9);
    }

    #[test]
    fn two_dimensional_forms() {
        assert_eq!(two_dim_syzygy(r(1.0), r(0.0), r(0.0)), C64::zero());
        assert_eq!(two_dim_syzygy(r(-1.0), r(-1.0), r(-1.0)), C64::zero());
        let l = c(0.3, -2.0);
        assert!(two_dim_syzygy(r(0.5), r(0.5), l).norm() < 1e-15);
        assert!(two_dim_companion(r(0.5), r(0.0), r(1.0)).is_none());
        let s = two_dim_companion(r(-1.0), r(-1.0), r(-1.0)).unwrap();
        assert!((s - 1.0).norm() < 1e-15);
    }
}
