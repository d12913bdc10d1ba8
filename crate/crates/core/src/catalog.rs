//! Named example algebras with their expected idempotent data.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Float, Zero};

use crate::algebra::{Algebra, Element};
use crate::metrised::{CubicForm, InnerProduct, algebra_from_cubic};
use crate::solve::IdempotentSet;
use crate::spectral::{classify_genericity, multiset_match, total_spectrum, GenericityKind};
use crate::{C64, Error, Result, c, r, rng};

/// `e_i^2 = e_i`, `e_i e_j = (alpha/2)(e_i + e_j - e_k)`.
pub fn matsuo_3c(alpha: C64) -> Algebra {
    let half = alpha * 0.5;
    Algebra::from_products(3, |i, j| {
        let mut v = vec![C64::zero(); 3];
        if i == j {
            v[i] = r(1.0);
        } else {
            v[i] = half;
            v[j] = half;
            v[3 - i - j] = -half;
        }
        v
    })
    .expect("symmetric by construction")
    .with_label(format!("matsuo_3c(alpha={})", fmt_c(alpha)))
}

/// `e_i^2 = e_i`, `e_i e_j = (alpha/2)(e_i + e_j) + ((eps - alpha)/2) e_k`.
pub fn generalized_matsuo(alpha: C64, eps: C64) -> Algebra {
    let half = alpha * 0.5;
    let third = (eps - alpha) * 0.5;
    Algebra::from_products(3, |i, j| {
        let mut v = vec![C64::zero(); 3];
        if i == j {
            v[i] = r(1.0);
        } else {
            v[i] = half;
            v[j] = half;
            v[3 - i - j] = third;
        }
        v
    })
    .expect("symmetric by construction")
    .with_label(format!("generalized_matsuo(alpha={}, eps={})", fmt_c(alpha), fmt_c(eps)))
}

/// `(e_1 + e_2 + e_3)/(alpha + 1 + eps)`.
pub fn generalized_matsuo_e7(alpha: C64, eps: C64) -> Element {
    let s = (alpha + 1.0 + eps).inv();
    Element::new(vec![s; 3])
}

/// `gamma = alpha + 1 + eps (eps - 2 alpha - 1)`.
pub fn generalized_matsuo_gamma(alpha: C64, eps: C64) -> C64 {
    alpha + 1.0 + eps * (eps - alpha * 2.0 - 1.0)
}

/// `((1 - eps)(alpha + 1 + eps)/gamma) e_7 - ((alpha + 1 - 2 eps)/gamma) e_i`.
pub fn generalized_matsuo_e3i(alpha: C64, eps: C64, i: usize) -> Element {
    let g = generalized_matsuo_gamma(alpha, eps);
    let e7 = generalized_matsuo_e7(alpha, eps);
    let a = (r(1.0) - eps) * (alpha + 1.0 + eps) / g;
    let b = (alpha + 1.0 - eps * 2.0) / g;
    let mut v = e7.scale(a).into_coords();
    v[i] -= b;
    Element::new(v)
}

/// Two idempotents `c_1, c_2` with `c_1 c_2 = l2 c_1 + l1 c_2`.
pub fn two_dim_from_pair(l1: C64, l2: C64) -> Algebra {
    Algebra::from_products(2, |i, j| match (i, j) {
        (0, 0) => vec![r(1.0), C64::zero()],
        (1, 1) => vec![C64::zero(), r(1.0)],
        _ => vec![l2, l1],
    })
    .expect("symmetric by construction")
    .with_label(format!("two_dim_from_pair(l1={}, l2={})", fmt_c(l1), fmt_c(l2)))
}

/// The third nonzero idempotent of [`two_dim_from_pair`] when
/// `1 - 4 l1 l2 != 0`, with its nontrivial eigenvalue.
pub fn two_dim_third(l1: C64, l2: C64) -> Option<(Element, C64)> {
    let delta = r(1.0) - l1 * l2 * 4.0;
    if delta.norm() < 1e-14 {
        return None;
    }
    let x = (r(1.0) - l2 * 2.0) / delta;
    let y = (r(1.0) - l1 * 2.0) / delta;
    let l3 = (r(1.0) - l1 - l2) / delta;
    Some((Element::new(vec![x, y]), l3))
}

/// `c_1 c_2 = c_1 + c_2/4`: two nonzero idempotents and the nilpotent `c_1 - c_2/2`.
pub fn nil2d() -> Algebra {
    two_dim_from_pair(r(0.25), r(1.0)).with_label("nil2d")
}

/// `e_1^2 = e_1`, `e_2^2 = -e_1`, `e_1 e_2 = -e_2`.
pub fn constant_spectrum_2d() -> Algebra {
    Algebra::from_products(2, |i, j| match (i, j) {
        (0, 0) => vec![r(1.0), C64::zero()],
        (1, 1) => vec![r(-1.0), C64::zero()],
        _ => vec![C64::zero(), r(-1.0)],
    })
    .expect("symmetric by construction")
    .with_label("constant_spectrum_2d")
}

fn const3d_constants(sign: f64) -> (C64, C64, C64) {
    let s7 = c(0.0, Float::sqrt(7.0));
    let root = (r(-6.0) + s7 * 2.0).sqrt() * 0.25;
    let alpha = r(-0.5) + root * sign;
    let beta = r(-0.5) - root * sign;
    let gamma = r(0.25) - s7 * 0.25;
    (alpha, beta, gamma)
}

/// `c_i c_j = alpha c_i + beta c_j + gamma c_k` for cyclic `(i, j, k)`, with
/// `alpha = -1/2 + sign * r`, `beta = -1/2 - sign * r`,
/// `r = sqrt(-6 + 2 sqrt(-7))/4`, `gamma = (1 - sqrt(-7))/4`.
pub fn constant_spectrum_3d_with_sign(sign: f64) -> Algebra {
    let (alpha, beta, gamma) = const3d_constants(sign);
    Algebra::from_products(3, |i, j| {
        let mut v = vec![C64::zero(); 3];
        if i == j {
            v[i] = r(1.0);
            return v;
        }
        // Orient (i, j) cyclically.
        let (p, q) = if (i + 1) % 3 == j { (i, j) } else { (j, i) };
        v[p] = alpha;
        v[q] = beta;
        v[3 - p - q] = gamma;
        v
    })
    .expect("symmetric by construction")
    .with_label("constant_spectrum_3d")
}

/// The four idempotents beyond the basis, `c_4 .. c_7`.
pub fn constant_spectrum_3d_extra() -> [Element; 4] {
    let (_, _, g) = const3d_constants(1.0);
    let gm = g - 1.0;
    [
        Element::new(vec![-g, -g, -g]),
        Element::new(vec![gm, -g, g]),
        Element::new(vec![g, gm, -g]),
        Element::new(vec![-g, g, gm]),
    ]
}

/// The sign choice for which `c_4 .. c_7` are idempotent.
pub fn constant_spectrum_3d() -> Algebra {
    let extra = constant_spectrum_3d_extra();
    let worst = |a: &Algebra| extra.iter().map(|x| a.idempotent_residual(x).unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    let minus = constant_spectrum_3d_with_sign(-1.0);
    let plus = constant_spectrum_3d_with_sign(1.0);
    if worst(&minus) <= worst(&plus) { minus } else { plus }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    Ok(())
}

fn euclidean_algebra(u: &CubicForm, label: String) -> Result<Algebra> {
    Ok(algebra_from_cubic(u, &InnerProduct::euclidean(u.dim()))?.with_label(label))
}

/// `(x_1^3 + ... + x_n^3)/6`.
pub fn cubic_u1_form(n: usize) -> Result<CubicForm> {
    check_dim(n)?;
    let monomials: Vec<(C64, Vec<u32>)> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 3;
            (r(1.0 / 6.0), e)
        })
        .collect();
    CubicForm::from_monomials(n, &monomials)
}

/// Coordinatewise product algebra on `C^n`.
pub fn cubic_u1(n: usize) -> Result<Algebra> {
    euclidean_algebra(&cubic_u1_form(n)?, format!("u1(n={n})"))
}

/// `eps x_1 x_2 x_3 + (x_1^3 + x_2^3 + x_3^3)/6`.
pub fn cubic_u1_eps_form(eps: C64) -> CubicForm {
    let s = r(1.0 / 6.0);
    CubicForm::from_monomials(3, &[(eps, vec![1, 1, 1]), (s, vec![3, 0, 0]), (s, vec![0, 3, 0]), (s, vec![0, 0, 3])])
        .expect("degree-3 monomials")
}

pub fn cubic_u1_eps(eps: C64) -> Algebra {
    euclidean_algebra(&cubic_u1_eps_form(eps), format!("u1_eps(eps={})", fmt_c(eps))).expect("euclidean form")
}

/// `x_1 (x_3^2 - x_4^2)/2 + i x_2 x_3 x_4`.
pub fn cubic_u2_form() -> CubicForm {
    CubicForm::from_monomials(
        4,
        &[(r(0.5), vec![1, 0, 2, 0]), (r(-0.5), vec![1, 0, 0, 2]), (c(0.0, 1.0), vec![0, 1, 1, 1])],
    )
    .expect("degree-3 monomials")
}

pub fn cubic_u2() -> Algebra {
    euclidean_algebra(&cubic_u2_form(), String::from("u2")).expect("euclidean form")
}

/// `(3 x_1^2 + 3 x_2^2 - (4k^2 - 2) x_3^2) x_3 / 6`.
pub fn cubic_circle_form(k: f64) -> Result<CubicForm> {
    if !k.is_finite() || k == 0.0 || (4.0 * k * k - 2.0).abs() < 1e-14 {
        return Err(Error::InvalidParameter(format!("circle needs k != 0 and 4k^2 != 2, got k = {k}")));
    }
    CubicForm::from_monomials(
        3,
        &[(r(0.5), vec![2, 0, 1]), (r(0.5), vec![0, 2, 1]), (r(-(4.0 * k * k - 2.0) / 6.0), vec![0, 0, 3])],
    )
}

pub fn cubic_circle(k: f64) -> Result<Algebra> {
    euclidean_algebra(&cubic_circle_form(k)?, format!("circle(k={k})"))
}

/// The isolated idempotent `(0, 0, -1/(4k^2 - 2))`.
pub fn cubic_circle_c0(k: f64) -> Element {
    Element::from_real(&[0.0, 0.0, -1.0 / (4.0 * k * k - 2.0)])
}

/// Structure constants with i.i.d. standard complex Gaussian entries for
/// `i <= j` (the `(j, i)` slot is a copy).
pub fn random_algebra(n: usize, seed: u64) -> Algebra {
    let mut g = rng::seeded(seed);
    Algebra::from_products(n, |_, _| (0..n).map(|_| rng::complex_gaussian(&mut g)).collect())
        .expect("symmetric by construction")
        .with_label(format!("random(n={n}, seed={seed})"))
}

/// Unital algebra: `e_0` is the unit, the products of `e_1 .. e_{n-1}`
/// are random.
pub fn random_unital(n: usize, seed: u64) -> Algebra {
    let mut g = rng::seeded(seed);
    Algebra::from_products(n, |i, j| {
        if i == 0 {
            let mut v = vec![C64::zero(); n];
            v[j] = r(1.0);
            v
        } else {
            (0..n).map(|_| rng::complex_gaussian(&mut g)).collect()
        }
    })
    .expect("symmetric by construction")
    .with_label(format!("random_unital(n={n}, seed={seed})"))
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 { format!("{}", z.re) } else { format!("{}{:+}i", z.re, z.im) }
}

/// Published (or hand-derived) facts about a catalog algebra.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Expected {
    /// Including the zero idempotent.
    pub idempotent_count: Option<usize>,
    pub nilpotent_count: Option<usize>,
    /// Spectra of individual idempotents (each a multiset); for a finite
    /// set every listed spectrum must occur, for a family they are the
    /// possible spectra.
    pub spectra: Vec<Vec<C64>>,
    /// Union of all spectra with multiplicities.
    pub total_spectrum: Option<Vec<C64>>,
    pub genericity: Option<GenericityKind>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub params: Vec<(String, C64)>,
    pub algebra: Algebra,
    /// The cubic form behind metrised entries.
    pub cubic: Option<CubicForm>,
    pub expected: Option<Expected>,
}

/// Builder arguments; unset values take the per-entry defaults.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Params {
    pub alpha: Option<C64>,
    pub eps: Option<C64>,
    pub k: Option<f64>,
    pub n: Option<usize>,
    pub l1: Option<C64>,
    pub l2: Option<C64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalogInfo {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub description: &'static str,
}

pub const CATALOG: &[CatalogInfo] = &[
    CatalogInfo { name: "matsuo", params: &["alpha"], description: "Matsuo algebra 3C_alpha (default alpha = 0.3)" },
    CatalogInfo {
        name: "gen-matsuo",
        params: &["alpha", "eps"],
        description: "generalized Matsuo algebra 3C_{alpha,eps} (defaults 0.3, 0.2)",
    },
    CatalogInfo { name: "pair2d", params: &["l1", "l2"], description: "2D algebra on idempotents with c1 c2 = l2 c1 + l1 c2" },
    CatalogInfo { name: "nil2d", params: &[], description: "2D algebra with two idempotents and a 2-nilpotent" },
    CatalogInfo { name: "const2d", params: &[], description: "2D algebra with constant spectrum {1, -1}" },
    CatalogInfo { name: "const3d", params: &[], description: "3D generic algebra with constant spectrum (cube roots of unity)" },
    CatalogInfo { name: "u1", params: &["n"], description: "cubic form (x_1^3 + ... + x_n^3)/6 (default n = 3)" },
    CatalogInfo { name: "u1eps", params: &["eps"], description: "u1 on R^3 plus eps x1 x2 x3 (default eps = 1)" },
    CatalogInfo { name: "u2", params: &[], description: "complex cubic form x1 (x3^2 - x4^2)/2 + i x2 x3 x4" },
    CatalogInfo { name: "circle", params: &["k"], description: "cubic form with a circle of idempotents (default k = 0.5)" },
    CatalogInfo { name: "random", params: &["n", "seed"], description: "complex Gaussian structure constants (defaults 3, 0)" },
    CatalogInfo { name: "random-unital", params: &["n", "seed"], description: "unit e_0 plus random products (defaults 3, 0)" },
];

fn near(a: C64, b: f64) -> bool {
    (a - b).norm() < 1e-12
}

fn repeat(spec: Vec<C64>, times: usize) -> Vec<Vec<C64>> {
    vec![spec; times]
}

fn matsuo_expected(alpha: C64) -> Expected {
    if near(alpha, 0.5) {
        return Expected {
            spectra: vec![vec![r(0.5), r(1.0), r(0.0)]],
            genericity: Some(GenericityKind::NongenericInfiniteFamily),
            ..Expected::default()
        };
    }
    if near(alpha, -1.0) {
        return Expected::default();
    }
    let mut spectra = vec![vec![C64::zero(); 3], vec![r(1.0); 3]];
    spectra.extend(repeat(vec![r(0.0), alpha, r(1.0)], 3));
    spectra.extend(repeat(vec![r(0.0), r(1.0) - alpha, r(1.0)], 3));
    Expected {
        idempotent_count: Some(8),
        nilpotent_count: Some(0),
        spectra,
        total_spectrum: None,
        genericity: if (alpha - 0.5).norm() > 1e-9 && (r(1.0) - alpha - 0.5).norm() > 1e-9 {
            Some(GenericityKind::Generic)
        } else {
            None
        },
    }
}

/// Spectra of `0, e_i, e_7, e_{3+i}` for the generalized Matsuo algebra.
pub fn generalized_matsuo_spectra(alpha: C64, eps: C64) -> Vec<Vec<C64>> {
    let g = generalized_matsuo_gamma(alpha, eps);
    let mu = r(1.0) - eps * 3.0 / ((r(1.0) + alpha + eps) * 2.0);
    let s1 = eps * (r(2.0) - alpha - eps) / (g * 2.0);
    let s2 = ((r(1.0) - alpha * alpha) * 2.0 + eps * (alpha * 3.0 - eps - 2.0)) / (g * 2.0);
    let mut spectra = vec![vec![C64::zero(); 3], vec![r(1.0), mu, mu]];
    spectra.extend(repeat(vec![r(1.0), alpha - eps * 0.5, eps * 0.5], 3));
    spectra.extend(repeat(vec![r(1.0), s1, s2], 3));
    spectra
}

fn generalized_matsuo_expected(alpha: C64, eps: C64) -> Expected {
    let g = generalized_matsuo_gamma(alpha, eps);
    if (alpha + 1.0 + eps).norm() < 1e-12 || g.norm() < 1e-12 {
        return Expected::default();
    }
    let spectra = generalized_matsuo_spectra(alpha, eps);
    if (eps - alpha * 2.0 + 1.0).norm() < 1e-12 {
        // 1/2 in every sigma(e_i) and the e_i lie on curves of idempotents.
        return Expected {
            spectra: spectra[2..5].to_vec(),
            genericity: Some(GenericityKind::NongenericInfiniteFamily),
            ..Expected::default()
        };
    }
    if near(eps, 1.0) {
        // e_{3+i} collapses onto e_i: five isolated idempotents, the e_i double.
        return Expected {
            idempotent_count: Some(5),
            nilpotent_count: Some(0),
            spectra: spectra[..5].to_vec(),
            total_spectrum: None,
            genericity: Some(GenericityKind::NongenericHalfInSpectrum),
        };
    }
    let half = spectra.iter().flatten().any(|v| (v - 0.5).norm() < 1e-9);
    let mut spectra = spectra;
    if generalized_matsuo_e3i(alpha, eps, 0).dist(&generalized_matsuo_e7(alpha, eps)) < 1e-9 {
        spectra.truncate(5);
    }
    Expected {
        idempotent_count: (!half).then_some(8),
        nilpotent_count: Some(0),
        spectra,
        total_spectrum: None,
        genericity: Some(if half { GenericityKind::NongenericHalfInSpectrum } else { GenericityKind::Generic }),
    }
}

fn pair_expected(l1: C64, l2: C64) -> Expected {
    match two_dim_third(l1, l2) {
        None => Expected {
            idempotent_count: Some(3),
            nilpotent_count: Some(1),
            spectra: vec![vec![r(0.0), r(0.0)], vec![r(1.0), l1], vec![r(1.0), l2]],
            total_spectrum: None,
            genericity: Some(GenericityKind::NongenericNilpotent),
        },
        Some((_, l3)) => {
            let half = [l1, l2, l3].iter().any(|v| (v - 0.5).norm() < 1e-9);
            Expected {
                idempotent_count: (!half).then_some(4),
                nilpotent_count: Some(0),
                spectra: vec![vec![r(0.0), r(0.0)], vec![r(1.0), l1], vec![r(1.0), l2], vec![r(1.0), l3]],
                total_spectrum: None,
                genericity: (!half).then_some(GenericityKind::Generic),
            }
        }
    }
}

fn u1_expected(n: usize) -> Expected {
    let spectra = (0u32..1 << n)
        .map(|mask| {
            let m = mask.count_ones() as usize;
            let mut s = vec![r(1.0); m];
            s.extend(vec![C64::zero(); n - m]);
            s
        })
        .collect();
    Expected {
        idempotent_count: Some(1 << n),
        nilpotent_count: Some(0),
        spectra,
        total_spectrum: None,
        genericity: Some(GenericityKind::Generic),
    }
}

/// Total spectrum of `u1_eps` away from the exceptional values, and the
/// separate description at `eps = 1`.
fn u1_eps_expected(eps: C64) -> Expected {
    if near(eps, 1.0) {
        let zero = C64::zero();
        let mut spectra = vec![vec![zero; 3], vec![zero, zero, r(1.0)]];
        spectra.extend(repeat(vec![zero, r(-1.0), r(1.0)], 3));
        spectra.extend(repeat(vec![r(-1.0), r(1.0), r(1.0)], 3));
        let mut total = vec![zero; 8];
        total.extend(vec![r(-1.0); 6]);
        total.extend(vec![r(1.0); 10]);
        return Expected {
            idempotent_count: Some(8),
            nilpotent_count: Some(0),
            spectra,
            total_spectrum: Some(total),
            genericity: Some(GenericityKind::Generic),
        };
    }
    if [0.5, -0.5, 0.25].iter().any(|&v| near(eps, v)) {
        return Expected::default();
    }
    let q = r(1.0) - eps * 2.0 + eps * eps * 4.0;
    let mut total = vec![C64::zero(); 3];
    total.extend(vec![eps; 3]);
    total.extend(vec![-eps; 3]);
    total.extend(vec![eps * (r(1.0) - eps) * 2.0 / q; 3]);
    total.extend(vec![r(1.0); 7]);
    total.extend(vec![(r(1.0) - eps) / (r(1.0) + eps * 2.0); 2]);
    total.extend(vec![(r(1.0) - eps * 2.0 - eps * eps * 2.0) / q; 3]);
    Expected {
        idempotent_count: Some(8),
        nilpotent_count: Some(0),
        spectra: Vec::new(),
        total_spectrum: Some(total),
        genericity: Some(GenericityKind::Generic),
    }
}

/// As published: nine nonzero idempotents, one nilpotent direction, and the
/// common spectrum `{-1/4 - sqrt(7)/4, -1/2, -1/4 + sqrt(7)/4, 1}`.
pub fn u2_published_spectrum() -> Vec<C64> {
    let s = Float::sqrt(7.0) / 4.0;
    vec![r(-0.25 - s), r(-0.5), r(-0.25 + s), r(1.0)]
}

fn u2_expected() -> Expected {
    Expected {
        idempotent_count: Some(10),
        nilpotent_count: Some(1),
        spectra: vec![u2_published_spectrum()],
        total_spectrum: None,
        genericity: Some(GenericityKind::NongenericNilpotent),
    }
}

fn circle_expected(k: f64) -> Expected {
    let m = -1.0 / (4.0 * k * k - 2.0);
    Expected {
        idempotent_count: None,
        nilpotent_count: None,
        spectra: vec![vec![r(1.0), r(0.5), r(0.5 - 2.0 * k * k)], vec![r(1.0), r(m), r(m)]],
        total_spectrum: None,
        genericity: Some(GenericityKind::NongenericInfiniteFamily),
    }
}

fn const2d_expected() -> Expected {
    let mut spectra = vec![vec![C64::zero(); 2]];
    spectra.extend(repeat(vec![r(1.0), r(-1.0)], 3));
    Expected {
        idempotent_count: Some(4),
        nilpotent_count: Some(0),
        spectra,
        total_spectrum: None,
        genericity: Some(GenericityKind::Generic),
    }
}

fn const3d_expected() -> Expected {
    let w = c(-0.5, Float::sqrt(3.0) / 2.0);
    let mut spectra = vec![vec![C64::zero(); 3]];
    spectra.extend(repeat(vec![r(1.0), w, w.conj()], 7));
    Expected {
        idempotent_count: Some(8),
        nilpotent_count: Some(0),
        spectra,
        total_spectrum: None,
        genericity: Some(GenericityKind::Generic),
    }
}

/// One comparison between solver output and an [`Expected`] field.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Compares a solved set with the catalog expectations; spectra are matched
/// one-to-one against distinct records.
pub fn check_expected(set: &IdempotentSet, exp: &Expected, tol: f64) -> Vec<ExpectationCheck> {
    let mut out = Vec::new();
    if let Some(n) = exp.idempotent_count {
        out.push(ExpectationCheck {
            name: "idempotent_count",
            passed: set.count() == n,
            detail: format!("found {}, expected {n}", set.count()),
        });
    }
    if let Some(n) = exp.nilpotent_count {
        let found = set.nilpotent_directions.len();
        out.push(ExpectationCheck { name: "nilpotent_count", passed: found == n, detail: format!("found {found}, expected {n}") });
    }
    if !exp.spectra.is_empty() {
        let mut used = vec![false; set.count()];
        let mut missing = Vec::new();
        for (k, spec) in exp.spectra.iter().enumerate() {
            match (0..set.count()).find(|&i| !used[i] && set.idempotents[i].spectrum.matches(spec, tol)) {
                Some(i) => used[i] = true,
                None => missing.push(k),
            }
        }
        out.push(ExpectationCheck {
            name: "spectra",
            passed: missing.is_empty(),
            detail: if missing.is_empty() {
                format!("all {} expected spectra matched", exp.spectra.len())
            } else {
                format!("expected spectra {missing:?} not matched by any idempotent")
            },
        });
    }
    if let Some(total) = &exp.total_spectrum {
        let found = total_spectrum(set);
        out.push(ExpectationCheck {
            name: "total_spectrum",
            passed: multiset_match(&found, total, tol),
            detail: format!("{} values found, {} expected", found.len(), total.len()),
        });
    }
    if let Some(kind) = exp.genericity {
        let v = classify_genericity(set);
        out.push(ExpectationCheck {
            name: "genericity",
            passed: v.kind == kind,
            detail: format!("found {}, expected {}", v.kind, kind),
        });
    }
    out
}

/// Builds a catalog entry by name.
pub fn build(name: &str, p: &Params) -> Result<CatalogEntry> {
    let cp = |k: &str, v: C64| (String::from(k), v);
    let mut cubic = None;
    let (params, algebra, expected) = match name {
        "matsuo" => {
            let a = p.alpha.unwrap_or(r(0.3));
            (vec![cp("alpha", a)], matsuo_3c(a), Some(matsuo_expected(a)))
        }
        "gen-matsuo" => {
            let a = p.alpha.unwrap_or(r(0.3));
            let e = p.eps.unwrap_or(r(0.2));
            (vec![cp("alpha", a), cp("eps", e)], generalized_matsuo(a, e), Some(generalized_matsuo_expected(a, e)))
        }
        "pair2d" => {
            let l1 = p.l1.unwrap_or(r(0.2));
            let l2 = p.l2.unwrap_or(r(0.7));
            (vec![cp("l1", l1), cp("l2", l2)], two_dim_from_pair(l1, l2), Some(pair_expected(l1, l2)))
        }
        "nil2d" => (vec![], nil2d(), Some(pair_expected(r(0.25), r(1.0)))),
        "const2d" => (vec![], constant_spectrum_2d(), Some(const2d_expected())),
        "const3d" => (vec![], constant_spectrum_3d(), Some(const3d_expected())),
        "u1" => {
            let n = p.n.unwrap_or(3);
            let u = cubic_u1_form(n)?;
            let a = euclidean_algebra(&u, format!("u1(n={n})"))?;
            cubic = Some(u);
            (vec![cp("n", r(n as f64))], a, Some(u1_expected(n)))
        }
        "u1eps" => {
            let e = p.eps.unwrap_or(r(1.0));
            cubic = Some(cubic_u1_eps_form(e));
            (vec![cp("eps", e)], cubic_u1_eps(e), Some(u1_eps_expected(e)))
        }
        "u2" => {
            cubic = Some(cubic_u2_form());
            (vec![], cubic_u2(), Some(u2_expected()))
        }
        "circle" => {
            let k = p.k.unwrap_or(0.5);
            let u = cubic_circle_form(k)?;
            let a = euclidean_algebra(&u, format!("circle(k={k})"))?;
            cubic = Some(u);
            (vec![cp("k", r(k))], a, Some(circle_expected(k)))
        }
        "random" | "random-unital" => {
            let n = p.n.unwrap_or(3);
            check_dim(n)?;
            let seed = p.seed.unwrap_or(0);
            let a = if name == "random" { random_algebra(n, seed) } else { random_unital(n, seed) };
            (vec![cp("n", r(n as f64)), cp("seed", r(seed as f64))], a, None)
        }
        other => return Err(Error::InvalidParameter(format!("unknown catalog entry '{other}'"))),
    };
    Ok(CatalogEntry { name: String::from(name), params, algebra, cubic, expected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::spectrum_of;

    #[test]
    fn generalized_reduces_to_matsuo() {
        for a in [r(0.3), c(0.2, -1.0), r(-1.0)] {
            assert_eq!(generalized_matsuo(a, C64::zero()).tensor(), matsuo_3c(a).tensor());
        }
    }

    #[test]
    fn generalized_matsuo_fixtures() {
        for (a, e) in [(r(0.3), r(0.2)), (r(0.7), r(-0.4))] {
            let g = generalized_matsuo(a, e);
            assert!(g.idempotent_residual(&generalized_matsuo_e7(a, e)).unwrap() < 1e-14);
            for i in 0..3 {
                assert!(g.idempotent_residual(&generalized_matsuo_e3i(a, e, i)).unwrap() < 1e-13);
                let s = spectrum_of(&g, &Element::basis(3, i), 1e-6).unwrap();
                assert!(s.matches(&[r(1.0), a - e * 0.5, e * 0.5], 1e-12));
            }
            let spectra = generalized_matsuo_spectra(a, e);
            let s7 = spectrum_of(&g, &generalized_matsuo_e7(a, e), 1e-6).unwrap();
            assert!(s7.matches(&spectra[1], 1e-9));
            let s4 = spectrum_of(&g, &generalized_matsuo_e3i(a, e, 0), 1e-6).unwrap();
            assert!(s4.matches(&spectra[5], 1e-9));
        }
    }

    #[test]
    fn pair_third_idempotent() {
        for (l1, l2) in [(r(0.0), r(0.0)), (r(0.2), r(0.7)), (c(1.0, 1.0), c(-0.3, 0.2))] {
            let a = two_dim_from_pair(l1, l2);
            let (x, l3) = two_dim_third(l1, l2).unwrap();
            assert!(a.idempotent_residual(&x).unwrap() < 1e-13);
            let s = spectrum_of(&a, &x, 1e-6).unwrap();
            assert!(s.matches(&[r(1.0), l3], 1e-10));
        }
        let (u, l3) = two_dim_third(r(0.0), r(0.0)).unwrap();
        assert_eq!(u, Element::from_real(&[1.0, 1.0]));
        assert_eq!(l3, r(1.0));
        let (_, l3) = two_dim_third(r(-1.0), r(-1.0)).unwrap();
        assert!((l3 + 1.0).norm() < 1e-15);
        assert!(two_dim_third(r(1.0), r(0.25)).is_none());
    }

    #[test]
    fn nil2d_nilpotent() {
        let a = nil2d();
        let w = Element::from_real(&[1.0, -0.5]);
        assert!(a.square(&w).unwrap().norm() < 1e-15);
    }

    #[test]
    fn const3d_sign_choice() {
        let a = constant_spectrum_3d();
        let extra = constant_spectrum_3d_extra();
        let w = c(-0.5, Float::sqrt(3.0) / 2.0);
        for x in &extra {
            assert!(a.idempotent_residual(x).unwrap() < 1e-13);
            assert!(spectrum_of(&a, x, 1e-6).unwrap().matches(&[r(1.0), w, w.conj()], 1e-9));
        }
        let sum = extra.iter().fold(Element::from_real(&[1.0, 1.0, 1.0]), |acc, x| &acc + x);
        assert!(sum.norm() < 1e-13);
        let wrong = constant_spectrum_3d_with_sign(1.0);
        assert!(wrong.idempotent_residual(&extra[1]).unwrap() > 1e-3);
    }

    #[test]
    fn const2d_idempotents() {
        let a = constant_spectrum_2d();
        let h = Float::sqrt(3.0) / 2.0;
        for p in [[1.0, 0.0], [-0.5, h], [-0.5, -h]] {
            let x = Element::from_real(&p);
            assert!(a.idempotent_residual(&x).unwrap() < 1e-15);
            assert!(spectrum_of(&a, &x, 1e-6).unwrap().matches(&[r(1.0), r(-1.0)], 1e-12));
        }
    }

    #[test]
    fn circle_fixture_points() {
        for k in [0.3, 0.5, 0.7, 0.9] {
            let a = cubic_circle(k).unwrap();
            for theta in [0.0, 1.0, 2.5] {
                let x = Element::from_real(&[k * Float::cos(theta), k * Float::sin(theta), 0.5]);
                assert!(a.idempotent_residual(&x).unwrap() < 1e-14);
                let s = spectrum_of(&a, &x, 1e-6).unwrap();
                assert!(s.matches(&[r(1.0), r(0.5), r(0.5 - 2.0 * k * k)], 1e-7), "{k} {s:?}");
            }
            let c0 = cubic_circle_c0(k);
            assert!(a.idempotent_residual(&c0).unwrap() < 1e-14);
        }
        assert!(cubic_circle(0.0).is_err());
        assert!(cubic_circle(Float::sqrt(0.5)).is_err());
    }

    #[test]
    fn u2_trace_and_structure() {
        let a = cubic_u2();
        // The plane x3 = x4 = 0 squares to zero.
        let w = Element::new(vec![c(0.3, 0.1), r(-1.2), C64::zero(), C64::zero()]);
        assert!(a.square(&w).unwrap().norm() < 1e-15);
        let x = Element::new(vec![r(0.2), c(0.0, 0.4), r(0.9), r(-0.1)]);
        assert!(a.left_mult_matrix(&x).unwrap().trace().norm() < 1e-15);
    }

    #[test]
    fn random_unital_has_unit() {
        let a = random_unital(4, 9);
        let e = a.find_unit().unwrap();
        assert!(e.dist(&Element::basis(4, 0)) < 1e-12);
    }

    #[test]
    fn fixtures_reproduced() {
        let cfg = crate::solve::SolveConfig::default();
        let p = |f: fn(&mut Params)| {
            let mut q = Params::default();
            f(&mut q);
            q
        };
        let mut cases: Vec<(&str, Params)> = CATALOG.iter().map(|i| (i.name, Params::default())).collect();
        cases.extend([
            ("matsuo", p(|q| q.alpha = Some(r(0.5)))),
            ("matsuo", p(|q| q.alpha = Some(c(0.2, 0.4)))),
            ("gen-matsuo", p(|q| q.eps = Some(r(1.0)))),
            ("gen-matsuo", p(|q| q.eps = Some(r(-0.4)))),
            ("gen-matsuo", p(|q| q.eps = Some(r(0.65)))),
            ("u1eps", p(|q| q.eps = Some(r(0.3)))),
            ("u1eps", p(|q| q.eps = Some(c(0.1, 0.2)))),
            ("u1", p(|q| q.n = Some(4))),
            ("circle", p(|q| q.k = Some(0.3))),
            ("circle", p(|q| q.k = Some(0.9))),
            ("pair2d", p(|q| {
                q.l1 = Some(r(-1.0));
                q.l2 = Some(r(-1.0));
            })),
        ]);
        for (name, params) in &cases {
            let entry = build(name, params).unwrap();
            let info = CATALOG.iter().find(|i| i.name == *name).unwrap();
            let Some(exp) = &entry.expected else { continue };
            let set = crate::solve::solve_idempotents(&entry.algebra, &cfg).unwrap();
            for check in check_expected(&set, exp, 1e-7) {
                // The published u2 count and spectrum do not survive an exact solve.
                let known_defect = info.name == "u2" && matches!(check.name, "idempotent_count" | "spectra");
                assert_eq!(check.passed, !known_defect, "{} {params:?}: {} ({})", info.name, check.name, check.detail);
            }
        }
    }

    #[test]
    fn registry_builds_everything() {
        assert!(CATALOG.len() >= 8);
        for info in CATALOG {
            let entry = build(info.name, &Params::default()).unwrap();
            assert_eq!(entry.name, info.name);
        }
        assert!(build("nope", &Params::default()).is_err());
    }
}
