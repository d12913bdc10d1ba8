use num_complex::Complex64 as C64;
use peirce_core::algebra::Algebra;
use peirce_core::catalog;
use peirce_core::solve::{solve_idempotents, SolveConfig};
use peirce_core::syzygy::{
    default_t_samples, general_syzygy, principal_coefficients, principal_syzygy, syzygy_report, two_dim_syzygy, Monomial,
    PolyMap,
};
use proptest::prelude::*;

fn permuted(a: &Algebra, p: &[usize]) -> Algebra {
    Algebra::from_fn(a.dim(), |i, j, k| a.structure(p[i], p[j], p[k])).unwrap()
}

/// Independent evaluation of the principal sum at one point from the records.
fn direct_sum(a: &Algebra, t: C64) -> C64 {
    let set = solve_idempotents(a, &SolveConfig::default()).unwrap();
    set.idempotents.iter().map(|r| r.charpoly.eval(t) / r.charpoly.eval(C64::new(0.5, 0.0))).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn syzygies_ignore_basis_order(n in 2usize..=4, seed in any::<u64>(), shuffle in any::<u64>()) {
        let a = catalog::random_algebra(n, seed);
        let mut p: Vec<usize> = (0..n).collect();
        let mut s = shuffle;
        for i in (1..n).rev() {
            p.swap(i, (s % (i as u64 + 1)) as usize);
            s /= i as u64 + 1;
        }
        let b = permuted(&a, &p);
        let cfg = SolveConfig::default();
        let sa = solve_idempotents(&a, &cfg).unwrap();
        let sb = solve_idempotents(&b, &cfg).unwrap();
        prop_assume!(sa.count() == 1 << n && sb.count() == 1 << n);
        let ca = principal_coefficients(&sa).unwrap();
        let cb = principal_coefficients(&sb).unwrap();
        for (x, y) in ca.iter().zip(&cb) {
            prop_assert!((x - y).norm() < 1e-8 * (1.0 + x.norm()));
        }
        prop_assert!(principal_syzygy(&sb, &default_t_samples()).unwrap() < 1e-8);
    }

    #[test]
    fn plane_syzygy_factors_at_half(l1 in (-3.0..3.0f64, -3.0..3.0f64), l2 in (-3.0..3.0f64, -3.0..3.0f64)) {
        let (l1, l2) = (C64::new(l1.0, l1.1), C64::new(l2.0, l2.1));
        let half = C64::new(0.5, 0.0);
        let lhs = two_dim_syzygy(l1, l2, half);
        let rhs = (l1 * 2.0 - 1.0) * (l2 * 2.0 - 1.0) * 0.5;
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        let sym = two_dim_syzygy(l2, half, l1);
        prop_assert!((sym - lhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    }
}

#[test]
fn principal_sum_is_two_to_the_n() {
    for a in [catalog::matsuo_3c(C64::new(0.3, 0.0)), catalog::constant_spectrum_3d(), catalog::random_algebra(4, 3)] {
        let n = a.dim();
        for t in [C64::new(0.0, 0.0), C64::new(0.7, -0.2), C64::new(3.0, 1.0)] {
            let s = direct_sum(&a, t);
            assert!((s - 2f64.powi(n as i32)).norm() < 1e-9 * 2f64.powi(n as i32), "{s}");
        }
    }
}

#[test]
fn report_on_generic_catalog() {
    let cfg = SolveConfig::default();
    for a in [
        catalog::matsuo_3c(C64::new(0.3, 0.0)),
        catalog::constant_spectrum_2d(),
        catalog::constant_spectrum_3d(),
        catalog::cubic_u1(3).unwrap(),
        catalog::generalized_matsuo(C64::new(0.3, 0.0), C64::new(0.2, 0.0)),
    ] {
        let set = solve_idempotents(&a, &cfg).unwrap();
        let rep = syzygy_report(&set, &default_t_samples()).unwrap();
        assert!(rep.max_residual() < 1e-9, "{:?}: {rep:?}", a.label());
        assert_eq!(rep.derivative_residuals.len(), a.dim());
    }
}

#[test]
fn general_syzygy_with_low_degree_maps() {
    let set = solve_idempotents(&catalog::random_algebra(3, 21), &SolveConfig::default()).unwrap();
    let one = C64::new(1.0, 0.0);
    let quadratic = PolyMap {
        components: vec![
            vec![Monomial { coeff: one, exponents: vec![2, 0, 0] }, Monomial { coeff: C64::new(0.0, 2.0), exponents: vec![0, 1, 1] }],
            vec![Monomial { coeff: C64::new(-1.5, 0.0), exponents: vec![1, 0, 0] }],
            vec![Monomial { coeff: one, exponents: vec![0, 0, 0] }],
        ],
    };
    assert!(general_syzygy(&set, &quadratic).unwrap() < 1e-8);
    let cubic = PolyMap { components: vec![vec![Monomial { coeff: one, exponents: vec![3, 0, 0] }], vec![], vec![]] };
    assert!(general_syzygy(&set, &cubic).is_err());
}
