//! Peirce spectra, Peirce dimensions and the genericity verdict.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;

use crate::algebra::{Algebra, CharPoly, Element};
use crate::linalg::{self, Mat, Svd};
use crate::solve::{IdempotentSet, SolveConfig};
use crate::{C64, Error, Result, poly, r};

/// Below this norm an idempotent is the zero idempotent.
pub const ZERO_TOL: f64 = 1e-10;
/// Imaginary parts below this (relative) mark a real solution.
pub const REAL_TOL: f64 = 1e-8;
/// Tolerance for the roots-of-unity assertions.
pub const UNITY_TOL: f64 = 1e-8;

/// Clustered characteristic roots with multiplicities, in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub roots: Vec<(C64, usize)>,
}

impl Spectrum {
    pub fn values(&self) -> impl Iterator<Item = C64> + '_ {
        self.roots.iter().map(|(v, _)| *v)
    }

    /// Roots repeated according to multiplicity.
    pub fn multiset(&self) -> Vec<C64> {
        self.roots.iter().flat_map(|&(v, m)| core::iter::repeat_n(v, m)).collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|(_, m)| m).sum()
    }

    /// Distance from `z` to the nearest root.
    pub fn distance_to(&self, z: C64) -> f64 {
        self.values().map(|v| (v - z).norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, z: C64, tol: f64) -> bool {
        self.distance_to(z) <= tol
    }

    pub fn multiplicity_of(&self, z: C64, tol: f64) -> usize {
        self.roots.iter().filter(|(v, _)| (v - z).norm() <= tol).map(|(_, m)| m).sum()
    }

    /// Multiset equality with `expected` (values repeated by multiplicity),
    /// up to `tol` per value.
    pub fn matches(&self, expected: &[C64], tol: f64) -> bool {
        multiset_match(&self.multiset(), expected, tol)
    }

    /// Same values with the same multiplicities.
    pub fn same_as(&self, other: &Spectrum, tol: f64) -> bool {
        self.roots.len() == other.roots.len()
            && self.roots.iter().all(|&(v, m)| other.multiplicity_of(v, tol * (1.0 + v.norm())) == m)
    }
}

/// Greedy matching of two multisets of complex numbers.
pub fn multiset_match(found: &[C64], expected: &[C64], tol: f64) -> bool {
    if found.len() != expected.len() {
        return false;
    }
    let mut used = alloc::vec![false; found.len()];
    for e in expected {
        let best = (0..found.len())
            .filter(|&i| !used[i])
            .min_by(|&i, &j| (found[i] - e).norm().partial_cmp(&(found[j] - e).norm()).unwrap_or(core::cmp::Ordering::Equal));
        match best {
            Some(i) if (found[i] - e).norm() <= tol => used[i] = true,
            _ => return false,
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdempotentRecord {
    pub point: Element,
    /// `|c^2 - c|`.
    pub residual: f64,
    pub charpoly: CharPoly,
    pub spectrum: Spectrum,
    /// `(lambda, dim ker(L_c - lambda I))` per Peirce number.
    pub peirce_dims: Vec<(C64, usize)>,
    pub semisimple: bool,
    /// 1/2 is not in the spectrum.
    pub regular: bool,
    /// Distance from 1/2 to the spectrum.
    pub half_distance: f64,
    pub is_real: bool,
    /// Smallest singular value of `2 L_c - I`.
    pub jacobian_min_singular_value: f64,
    /// Number of homotopy paths that ended on this idempotent.
    pub multiplicity_estimate: usize,
    /// Perturbed restarts found other idempotents arbitrarily close by.
    pub on_family: bool,
}

impl IdempotentRecord {
    pub fn new(a: &Algebra, point: Element, cfg: &SolveConfig) -> Self {
        let n = a.dim();
        let residual = a.idempotent_residual(&point).unwrap_or(f64::INFINITY);
        let l = a.left_mult_slice(point.coords());
        let charpoly = a.char_poly(&point).expect("dimension checked");
        let spectrum = spectrum_from_charpoly(&charpoly, cfg.cluster_tol);
        let peirce_dims = peirce_dims_of(&l, &spectrum, cfg.rank_tol);
        let semisimple = peirce_dims.iter().map(|(_, d)| d).sum::<usize>() == n;
        let half_distance = spectrum.distance_to(r(0.5));
        let jac = l.scale(r(2.0)).shifted(r(1.0));
        IdempotentRecord {
            is_real: point.is_real(REAL_TOL),
            point,
            residual,
            charpoly,
            regular: half_distance > cfg.cluster_tol,
            half_distance,
            spectrum,
            peirce_dims,
            semisimple,
            jacobian_min_singular_value: linalg::min_singular_value(&jac),
            multiplicity_estimate: 1,
            on_family: false,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.point.norm() <= ZERO_TOL
    }

    /// `p_c(1/2)`.
    pub fn p_half(&self) -> C64 {
        self.charpoly.eval(r(0.5))
    }
}

pub fn spectrum_from_charpoly(p: &CharPoly, cluster_tol: f64) -> Spectrum {
    let roots = poly::roots(p.coeffs());
    Spectrum { roots: poly::cluster_roots(p.coeffs(), &roots, cluster_tol) }
}

/// Peirce spectrum of any element.
pub fn spectrum_of(a: &Algebra, x: &Element, cluster_tol: f64) -> Result<Spectrum> {
    Ok(spectrum_from_charpoly(&a.char_poly(x)?, cluster_tol))
}

fn peirce_dims_of(l: &Mat, spectrum: &Spectrum, rank_tol: f64) -> Vec<(C64, usize)> {
    let scale = Svd::new(l).max_sigma().max(1.0);
    spectrum
        .values()
        .map(|lam| {
            let svd = Svd::new(&l.shifted(lam));
            (lam, svd.kernel(rank_tol * scale).len())
        })
        .collect()
}

/// Peirce dimensions per Peirce number and the semisimplicity flag.
pub fn peirce_data(a: &Algebra, c: &Element, cfg: &SolveConfig) -> Result<(Vec<(C64, usize)>, bool)> {
    let l = a.left_mult_matrix(c)?;
    let spectrum = spectrum_of(a, c, cfg.cluster_tol)?;
    let dims = peirce_dims_of(&l, &spectrum, cfg.rank_tol);
    let semisimple = dims.iter().map(|(_, d)| d).sum::<usize>() == a.dim();
    Ok((dims, semisimple))
}

/// Orthonormal basis of the Peirce eigenspace `A_c(lambda)`.
pub fn eigenspace(a: &Algebra, c: &Element, lambda: C64, rank_tol: f64) -> Result<Vec<Vec<C64>>> {
    let l = a.left_mult_matrix(c)?;
    let scale = Svd::new(&l).max_sigma().max(1.0);
    Ok(Svd::new(&l.shifted(lambda)).kernel(rank_tol * scale))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenericityKind {
    Generic,
    NongenericHalfInSpectrum,
    NongenericNilpotent,
    NongenericInfiniteFamily,
    Undetermined,
}

impl GenericityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GenericityKind::Generic => "generic",
            GenericityKind::NongenericHalfInSpectrum => "nongeneric_half_in_spectrum",
            GenericityKind::NongenericNilpotent => "nongeneric_nilpotent",
            GenericityKind::NongenericInfiniteFamily => "nongeneric_infinite_family",
            GenericityKind::Undetermined => "undetermined",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            GenericityKind::Generic,
            GenericityKind::NongenericHalfInSpectrum,
            GenericityKind::NongenericNilpotent,
            GenericityKind::NongenericInfiniteFamily,
            GenericityKind::Undetermined,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

impl fmt::Display for GenericityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericityVerdict {
    pub kind: GenericityKind,
    pub evidence: String,
    /// The evidence contradicts the theory (full count with 1/2 in a spectrum).
    pub inconsistent: bool,
}

/// Generic means: every path accounted for, `2^n` distinct idempotents, no
/// nilpotents, no family. Otherwise the first of infinite family, nilpotent,
/// 1/2-in-spectrum that applies; `undetermined` when none applies or when
/// the evidence contradicts itself.
pub fn classify_genericity(set: &IdempotentSet) -> GenericityVerdict {
    let n = set.dim();
    let count = set.count();
    let expected = 1usize << n;
    let half: Vec<(usize, f64)> = set
        .idempotents
        .iter()
        .enumerate()
        .filter(|(_, rec)| !rec.regular)
        .map(|(i, rec)| (i, rec.half_distance))
        .collect();
    let counts = format!(
        "{count} idempotents (2^{n} = {expected}), {} nilpotent directions, {} of {} paths failed",
        set.nilpotent_directions.len(),
        set.paths_failed,
        set.paths_total
    );
    let verdict = |kind, extra: String| GenericityVerdict { kind, evidence: format!("{counts}; {extra}"), inconsistent: false };
    if set.has_infinite_family {
        let on = set.idempotents.iter().filter(|rec| rec.on_family).count();
        return verdict(GenericityKind::NongenericInfiniteFamily, format!("{on} idempotents lie on a positive-dimensional family"));
    }
    if !set.nilpotent_directions.is_empty() {
        let fam = if set.has_nilpotent_family { " (positive-dimensional)" } else { "" };
        return verdict(GenericityKind::NongenericNilpotent, format!("2-nilpotents present{fam}"));
    }
    let all_generic = set.exhaustive && count == expected;
    if !half.is_empty() {
        let list: Vec<String> = half.iter().map(|(i, d)| format!("#{i} at distance {d:.3e}")).collect();
        let detail = format!("1/2 in the spectrum of {}", list.join(", "));
        return if all_generic {
            GenericityVerdict { inconsistent: true, ..verdict(GenericityKind::Undetermined, format!("inconsistent: full count but {detail}")) }
        } else {
            verdict(GenericityKind::NongenericHalfInSpectrum, detail)
        };
    }
    if !set.exhaustive {
        return verdict(GenericityKind::Undetermined, String::from("solver not exhaustive"));
    }
    if count != expected {
        return verdict(GenericityKind::Undetermined, String::from("count differs from 2^n without a detected cause"));
    }
    let closest = set.idempotents.iter().map(|rec| rec.half_distance).fold(f64::INFINITY, f64::min);
    verdict(GenericityKind::Generic, format!("closest eigenvalue to 1/2 at distance {closest:.3e}"))
}

/// Distinct Peirce numbers over all nonzero idempotents.
pub fn algebra_spectrum(set: &IdempotentSet) -> Vec<C64> {
    let tol = set.config.cluster_tol;
    let mut out: Vec<C64> = Vec::new();
    for rec in set.nonzero() {
        for v in rec.spectrum.values() {
            if !out.iter().any(|w| (w - v).norm() <= tol * (1.0 + v.norm())) {
                out.push(v);
            }
        }
    }
    out.sort_by(poly::lex_cmp);
    out
}

/// Union of all spectra with multiplicities, the zero idempotent included.
pub fn total_spectrum(set: &IdempotentSet) -> Vec<C64> {
    let mut out: Vec<C64> = set.idempotents.iter().flat_map(|rec| rec.spectrum.multiset()).collect();
    out.sort_by(poly::lex_cmp);
    out
}

fn require_generic(set: &IdempotentSet) -> Result<()> {
    let v = classify_genericity(set);
    if v.kind == GenericityKind::Generic { Ok(()) } else { Err(Error::NotGeneric(v.kind)) }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantSpectrumReport {
    pub constant: bool,
    /// The shared spectrum when constant.
    pub spectrum: Option<Spectrum>,
    pub report: String,
}

/// Whether all nonzero idempotents share one spectrum; a shared spectrum
/// must consist of the n-th roots of unity.
pub fn constant_spectrum_check(set: &IdempotentSet) -> Result<ConstantSpectrumReport> {
    require_generic(set)?;
    let n = set.dim();
    let tol = set.config.cluster_tol;
    let mut nonzero = set.nonzero();
    let Some(first) = nonzero.next() else {
        return Ok(ConstantSpectrumReport { constant: false, spectrum: None, report: String::from("no nonzero idempotents") });
    };
    if let Some((i, _)) = nonzero.enumerate().find(|(_, rec)| !rec.spectrum.same_as(&first.spectrum, tol)) {
        return Ok(ConstantSpectrumReport {
            constant: false,
            spectrum: None,
            report: format!("nonzero idempotent #{} differs from the first", i + 1),
        });
    }
    let roots = &first.spectrum.roots;
    let worst = roots.iter().map(|(z, _)| (z.powu(n as u32) - 1.0).norm()).fold(0.0, f64::max);
    if roots.len() != n || roots.iter().any(|(_, m)| *m != 1) || worst >= UNITY_TOL {
        return Err(Error::InconsistencyWithCorollary(format!(
            "shared spectrum is not the {n}-th roots of unity (max |z^n - 1| = {worst:.3e}, {} distinct values)",
            roots.len()
        )));
    }
    Ok(ConstantSpectrumReport {
        constant: true,
        spectrum: Some(first.spectrum.clone()),
        report: format!("all {} nonzero spectra equal the {n}-th roots of unity (max |z^n - 1| = {worst:.3e})", set.nonzero().count()),
    })
}

/// Eigenvalues other than 1 shared by every nonzero idempotent; each must be
/// a nontrivial n-th root of unity.
pub fn common_eigenvalue_check(set: &IdempotentSet) -> Result<Vec<C64>> {
    require_generic(set)?;
    let n = set.dim();
    let tol = set.config.cluster_tol;
    let mut nonzero = set.nonzero();
    let Some(first) = nonzero.next() else { return Ok(Vec::new()) };
    let rest: Vec<_> = nonzero.collect();
    let common: Vec<C64> = first
        .spectrum
        .values()
        .filter(|v| (v - 1.0).norm() > tol)
        .filter(|&v| rest.iter().all(|rec| rec.spectrum.contains(v, tol * (1.0 + v.norm()))))
        .collect();
    for &alpha in &common {
        let dev = (alpha.powu(n as u32) - 1.0).norm();
        if dev >= UNITY_TOL {
            return Err(Error::InconsistencyWithCorollary(format!(
                "common eigenvalue {alpha} has |alpha^{n} - 1| = {dev:.3e}"
            )));
        }
    }
    Ok(common)
}

/// `|det(2 L_c - I)|` and `2^n |p_c(1/2)|`, which agree for every element.
pub fn jacobian_determinant_pair(a: &Algebra, c: &Element) -> Result<(f64, f64)> {
    let l = a.left_mult_matrix(c)?;
    let det = linalg::det(&l.scale(r(2.0)).shifted(r(1.0))).norm();
    let p = a.char_poly(c)?;
    Ok((det, Float::powi(2.0, a.dim() as i32) * p.eval(r(0.5)).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::solve_idempotents;
    use crate::{c, catalog};

    fn cfg() -> SolveConfig {
        SolveConfig::with_seed(1)
    }

    #[test]
    fn zero_element_spectrum() {
        let a = catalog::matsuo_3c(r(0.3));
        let s = spectrum_of(&a, &Element::zeros(3), 1e-6).unwrap();
        assert_eq!(s.roots.len(), 1);
        assert_eq!(s.roots[0].1, 3);
        assert!(s.roots[0].0.norm() < 1e-12);
    }

    #[test]
    fn matsuo_basis_spectrum() {
        let a = catalog::matsuo_3c(r(0.3));
        let s = spectrum_of(&a, &Element::basis(3, 0), 1e-6).unwrap();
        assert!(s.matches(&[r(0.0), r(0.3), r(1.0)], 1e-12));
    }

    #[test]
    fn peirce_dims_of_unit_and_matsuo_e7() {
        let a = catalog::matsuo_3c(r(0.3));
        let e = a.find_unit().unwrap();
        let (dims, ss) = peirce_data(&a, &e, &cfg()).unwrap();
        assert!(ss);
        assert_eq!(dims.len(), 1);
        assert!((dims[0].0 - 1.0).norm() < 1e-10 && dims[0].1 == 3);

        let (al, ep) = (r(0.3), r(0.2));
        let g = catalog::generalized_matsuo(al, ep);
        let e7 = catalog::generalized_matsuo_e7(al, ep);
        assert!(g.idempotent_residual(&e7).unwrap() < 1e-14);
        let mu = r(1.0) - ep * 3.0 / ((r(1.0) + al + ep) * 2.0);
        let (dims, ss) = peirce_data(&g, &e7, &cfg()).unwrap();
        assert!(ss);
        assert!(dims.iter().any(|(l, d)| (l - 1.0).norm() < 1e-10 && *d == 1));
        assert!(dims.iter().any(|(l, d)| (l - mu).norm() < 1e-10 && *d == 2));
    }

    #[test]
    fn non_semisimple_detected() {
        // e1^2 = e2, everything else zero: L_{e1} is a nilpotent Jordan block.
        let jordan = Algebra::from_products(2, |i, j| match (i, j) {
            (0, 0) => alloc::vec![r(0.0), r(1.0)],
            _ => alloc::vec![r(0.0), r(0.0)],
        })
        .unwrap();
        let (dims, ss) = peirce_data(&jordan, &Element::basis(2, 0), &cfg()).unwrap();
        assert!(!ss);
        assert_eq!(dims, alloc::vec![(dims[0].0, 1)]);
    }

    #[test]
    fn verdicts() {
        let set = solve_idempotents(&catalog::matsuo_3c(r(0.3)), &cfg()).unwrap();
        assert_eq!(classify_genericity(&set).kind, GenericityKind::Generic);
        let set = solve_idempotents(&catalog::matsuo_3c(r(0.5)), &cfg()).unwrap();
        assert_eq!(classify_genericity(&set).kind, GenericityKind::NongenericInfiniteFamily);
        let set = solve_idempotents(&catalog::two_dim_from_pair(r(1.0), r(0.25)), &cfg()).unwrap();
        assert_eq!(classify_genericity(&set).kind, GenericityKind::NongenericNilpotent);
    }

    #[test]
    fn algebra_spectra() {
        let set = solve_idempotents(&catalog::matsuo_3c(r(0.3)), &cfg()).unwrap();
        let s = algebra_spectrum(&set);
        assert!(multiset_match(&s, &[r(0.0), r(0.3), r(0.7), r(1.0)], 1e-9));
        let set = solve_idempotents(&catalog::constant_spectrum_2d(), &cfg()).unwrap();
        assert!(multiset_match(&algebra_spectrum(&set), &[r(-1.0), r(1.0)], 1e-9));
        let set = solve_idempotents(&catalog::cubic_u1(3).unwrap(), &cfg()).unwrap();
        assert!(multiset_match(&algebra_spectrum(&set), &[r(0.0), r(1.0)], 1e-9));
    }

    #[test]
    fn constant_and_common() {
        let set = solve_idempotents(&catalog::constant_spectrum_2d(), &cfg()).unwrap();
        let rep = constant_spectrum_check(&set).unwrap();
        assert!(rep.constant);
        let common = common_eigenvalue_check(&set).unwrap();
        assert_eq!(common.len(), 1);
        assert!((common[0] + 1.0).norm() < 1e-9);

        let set = solve_idempotents(&catalog::matsuo_3c(r(0.3)), &cfg()).unwrap();
        assert!(!constant_spectrum_check(&set).unwrap().constant);
        assert!(common_eigenvalue_check(&set).unwrap().is_empty());

        let set = solve_idempotents(&catalog::constant_spectrum_3d(), &cfg()).unwrap();
        assert!(constant_spectrum_check(&set).unwrap().constant);
        let common = common_eigenvalue_check(&set).unwrap();
        let w = c(-0.5, Float::sqrt(3.0) / 2.0);
        assert!(multiset_match(&common, &[w, w.conj()], 1e-8));
    }

    #[test]
    fn checks_refuse_nongeneric() {
        let set = solve_idempotents(&catalog::two_dim_from_pair(r(1.0), r(0.25)), &cfg()).unwrap();
        assert_eq!(constant_spectrum_check(&set), Err(Error::NotGeneric(GenericityKind::NongenericNilpotent)));
    }

    #[test]
    fn determinant_identity() {
        let a = catalog::random_algebra(3, 5);
        let x = Element::new(alloc::vec![c(0.1, 0.2), c(-0.7, 0.0), c(0.3, 1.1)]);
        let (d, p) = jacobian_determinant_pair(&a, &x).unwrap();
        assert!((d - p).abs() < 1e-10 * (1.0 + d));
    }

    #[test]
    fn kind_names_round_trip() {
        for k in [
            GenericityKind::Generic,
            GenericityKind::NongenericHalfInSpectrum,
            GenericityKind::NongenericNilpotent,
            GenericityKind::NongenericInfiniteFamily,
            GenericityKind::Undetermined,
        ] {
            assert_eq!(GenericityKind::parse(k.as_str()), Some(k));
        }
    }
}
