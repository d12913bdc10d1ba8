use num_complex::Complex64 as C64;
use peirce_core::algebra::{Algebra, Element};
use peirce_core::catalog;
use peirce_core::linalg::{self, Mat};
use peirce_core::solve::{solve_idempotents, SolveConfig};
use proptest::prelude::*;

fn element(n: usize) -> impl Strategy<Value = Element> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), n)
        .prop_map(|v| Element::new(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()))
}

fn algebra_and_elements(k: usize) -> impl Strategy<Value = (Algebra, Vec<Element>)> {
    (1usize..=4, any::<u64>()).prop_flat_map(move |(n, seed)| {
        (Just(catalog::random_algebra(n, seed)), prop::collection::vec(element(n), k))
    })
}

fn lin(a: C64, x: &Element, b: C64, y: &Element) -> Element {
    Element::new(x.coords().iter().zip(y.coords()).map(|(u, v)| a * u + b * v).collect())
}

/// Laplace expansion along the first row.
fn cofactor_det(m: &Mat) -> C64 {
    let n = m.rows();
    if n == 1 {
        return m[(0, 0)];
    }
    (0..n)
        .map(|j| {
            let minor = Mat::from_fn(n - 1, n - 1, |i, k| m[(i + 1, if k < j { k } else { k + 1 })]);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            m[(0, j)] * cofactor_det(&minor) * sign
        })
        .sum()
}

fn mat_poly(coeffs: &[C64], m: &Mat) -> Mat {
    let n = m.rows();
    coeffs.iter().rev().fold(Mat::zeros(n, n), |acc, &a| {
        let next = acc.mul_mat(m);
        Mat::from_fn(n, n, |i, j| next[(i, j)] + if i == j { a } else { C64::new(0.0, 0.0) })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_bilinear_and_commutative((a, xs) in algebra_and_elements(3), s in (-2.0..2.0f64, -2.0..2.0f64)) {
        let s = C64::new(s.0, s.1);
        let (x, y, z) = (&xs[0], &xs[1], &xs[2]);
        let xy = a.multiply(x, y).unwrap();
        let yx = a.multiply(y, x).unwrap();
        prop_assert!(xy.dist(&yx) <= 1e-12 * (1.0 + xy.norm()));
        let lhs = a.multiply(&lin(s, x, C64::new(1.0, 0.0), y), z).unwrap();
        let rhs = lin(s, &a.multiply(x, z).unwrap(), C64::new(1.0, 0.0), &a.multiply(y, z).unwrap());
        prop_assert!(lhs.dist(&rhs) <= 1e-11 * (1.0 + rhs.norm()));
        let l = a.left_mult_matrix(x).unwrap();
        prop_assert!(linalg::dist(&l.mul_vec(y.coords()), xy.coords()) <= 1e-12 * (1.0 + xy.norm()));
    }

    #[test]
    fn charpoly_annihilates_and_matches_trace((a, xs) in algebra_and_elements(1)) {
        let x = &xs[0];
        let l = a.left_mult_matrix(x).unwrap();
        let p = a.char_poly(x).unwrap();
        let n = a.dim();
        prop_assert_eq!(p.degree(), n);
        prop_assert_eq!(p.coeffs()[n], C64::new(1.0, 0.0));
        let scale = 1.0 + l.norm_fro().powi(n as i32);
        prop_assert!(mat_poly(p.coeffs(), &l).max_abs() <= 1e-10 * scale);
        prop_assert!((p.coeffs()[n - 1] + l.trace()).norm() <= 1e-12 * (1.0 + l.norm_fro()));
        let det = cofactor_det(&l);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((p.coeffs()[0] - det * sign).norm() <= 1e-10 * scale);
        for lambda in linalg::eigenvalues(&l) {
            prop_assert!(p.eval(lambda).norm() <= 1e-8 * scale);
        }
    }

    #[test]
    fn conjugates_reflect_charpoly(m in 2usize..=4, seed in any::<u64>()) {
        let a = catalog::random_unital(m, seed);
        let e = a.find_unit().unwrap();
        let set = solve_idempotents(&a, &SolveConfig::with_seed(seed)).unwrap();
        let one = C64::new(1.0, 0.0);
        for rec in set.nonzero() {
            let cbar = a.conjugate_idempotent(&e, &rec.point, 1e-9).unwrap();
            let back = a.conjugate_idempotent(&e, &cbar, 1e-9).unwrap();
            prop_assert!(back.dist(&rec.point) < 1e-12 * (1.0 + rec.point.norm()));
            let cc = a.multiply(&rec.point, &cbar).unwrap();
            prop_assert!(cc.norm() < 1e-8 * (1.0 + rec.point.norm()).powi(2));
            let pbar = a.char_poly(&cbar).unwrap();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            for t in [C64::new(0.3, 0.1), C64::new(-1.0, 0.5), C64::new(2.0, 0.0)] {
                let lhs = pbar.eval(t);
                let rhs = rec.charpoly.eval(one - t) * sign;
                prop_assert!((lhs - rhs).norm() < 1e-7 * (1.0 + rhs.norm()));
            }
        }
    }
}

#[test]
fn jacobian_determinant_is_charpoly_at_half() {
    let cfg = SolveConfig::default();
    for n in 1..=4 {
        for seed in 0..10 {
            let a = catalog::random_algebra(n, seed);
            let set = solve_idempotents(&a, &cfg).unwrap();
            for rec in &set.idempotents {
                let l = a.left_mult_matrix(&rec.point).unwrap();
                let j = Mat::from_fn(n, n, |i, k| l[(i, k)] * 2.0 - if i == k { 1.0 } else { 0.0 });
                let det = cofactor_det(&j).norm();
                let expect = 2f64.powi(n as i32) * rec.p_half().norm();
                assert!((det - expect).abs() < 1e-9 * (1.0 + expect), "n={n} seed={seed}: {det} vs {expect}");
            }
        }
    }
}

#[test]
fn random_cubes_are_generic() {
    let cfg = SolveConfig::default();
    let generic = (0..500)
        .filter(|&seed| {
            let set = solve_idempotents(&catalog::random_algebra(3, seed), &cfg).unwrap();
            let v = peirce_core::spectral::classify_genericity(&set);
            v.kind == peirce_core::spectral::GenericityKind::Generic && set.count() == 8
        })
        .count();
    assert!(generic >= 495, "{generic}/500 generic");
}
