//! Dense univariate polynomials with complex coefficients in ascending
//! order, plus a simultaneous root finder.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // f64 math methods come from `Float` when built without std
use num_traits::{Float, Zero};

use crate::linalg::{self, Mat};
use crate::{C64, r};

/// Noise multiplier used when deciding whether a Taylor coefficient is
/// numerically zero.
const NOISE_FACTOR: f64 = 1e3;

pub fn eval(coeffs: &[C64], t: C64) -> C64 {
    coeffs.iter().rev().fold(C64::zero(), |acc, a| acc * t + a)
}

pub fn derivative(coeffs: &[C64]) -> Vec<C64> {
    coeffs.iter().enumerate().skip(1).map(|(i, a)| a * i as f64).collect()
}

pub fn nth_derivative(coeffs: &[C64], k: usize) -> Vec<C64> {
    (0..k).fold(coeffs.to_vec(), |p, _| derivative(&p))
}

/// Synthetic division by `(t - root)`: returns the quotient and remainder.
pub fn deflate(coeffs: &[C64], root: C64) -> (Vec<C64>, C64) {
    let n = coeffs.len();
    if n == 0 {
        return (Vec::new(), C64::zero());
    }
    let mut q = vec![C64::zero(); n - 1];
    let mut carry = C64::zero();
    for i in (0..n).rev() {
        let v = coeffs[i] + carry * root;
        if i == 0 {
            return (q, v);
        }
        q[i - 1] = v;
        carry = v;
    }
    unreachable!()
}

/// Coefficients of `z -> p(center + z)`.
pub fn taylor_shift(coeffs: &[C64], center: C64) -> Vec<C64> {
    let mut q = coeffs.to_vec();
    let n = q.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = q[j + 1] * center;
            q[j] += t;
        }
    }
    q
}

/// Rounding-level magnitude of the `j`-th Taylor coefficient at `center`.
fn noise_level(coeffs: &[C64], center: C64, j: usize) -> f64 {
    let m = center.norm();
    let mut total = 0.0;
    for (i, a) in coeffs.iter().enumerate().skip(j) {
        total += a.norm() * binomial(i, j) * m.powi((i - j) as i32);
    }
    NOISE_FACTOR * f64::EPSILON * total.max(f64::MIN_POSITIVE)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stalled;

/// Aberth–Ehrlich iteration seeded on a circle around the root centroid.
pub fn aberth_roots(coeffs: &[C64]) -> Result<Vec<C64>, Stalled> {
    let p = monic(coeffs);
    let n = p.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let center = -p[n - 1] / n as f64;
    let shifted = taylor_shift(&p, center);
    let radius = (1..=n)
        .map(|k| shifted[n - k].norm().powf(1.0 / k as f64))
        .fold(0.0, f64::max)
        * 2.0;
    if radius == 0.0 {
        return Ok(vec![center; n]);
    }
    let dp = derivative(&p);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let theta = 2.0 * core::f64::consts::PI * k as f64 / n as f64 + 0.4;
            center + C64::from_polar(radius, theta)
        })
        .collect();
    for _ in 0..2000 {
        let mut done = true;
        for k in 0..n {
            let pk = eval(&p, z[k]);
            if pk.is_zero() || pk.norm() <= noise_level(&p, z[k], 0) / NOISE_FACTOR * 4.0 {
                continue;
            }
            let dk = eval(&dp, z[k]);
            let ratio = if dk.is_zero() { pk / (r(1e-12) * (1.0 + z[k].norm())) } else { pk / dk };
            let repulsion: C64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.is_zero() { C64::zero() } else { d.inv() }
                })
                .sum();
            let step = ratio / (r(1.0) - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                return Err(Stalled);
            }
            z[k] -= step;
            if step.norm() > 1e-15 * (1.0 + z[k].norm()) {
                done = false;
            }
        }
        if done {
            for zk in z.iter_mut() {
                *zk = newton_polish(&p, &dp, *zk);
            }
            return Ok(z);
        }
    }
    Err(Stalled)
}

fn newton_polish(p: &[C64], dp: &[C64], mut z: C64) -> C64 {
    let mut val = eval(p, z).norm();
    for _ in 0..3 {
        let d = eval(dp, z);
        if d.is_zero() || val == 0.0 {
            break;
        }
        let cand = z - eval(p, z) / d;
        let cv = eval(p, cand).norm();
        if cv < val {
            z = cand;
            val = cv;
        } else {
            break;
        }
    }
    z
}

/// Eigenvalues of the companion matrix of `coeffs`.
pub fn companion_roots(coeffs: &[C64]) -> Vec<C64> {
    let p = monic(coeffs);
    let n = p.len() - 1;
    let m = Mat::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -p[i]
        } else if i == j + 1 {
            r(1.0)
        } else {
            C64::zero()
        }
    });
    linalg::eigenvalues(&m)
}

/// Roots by Aberth–Ehrlich, falling back to companion eigenvalues.
pub fn roots(coeffs: &[C64]) -> Vec<C64> {
    aberth_roots(coeffs).unwrap_or_else(|_| companion_roots(coeffs))
}

fn monic(coeffs: &[C64]) -> Vec<C64> {
    let mut n = coeffs.len();
    while n > 1 && coeffs[n - 1].is_zero() {
        n -= 1;
    }
    let lead = coeffs[n - 1];
    coeffs[..n].iter().map(|a| a / lead).collect()
}

/// Groups numerically coincident roots into (value, multiplicity) pairs.
///
/// A group of `m` roots is accepted as one `m`-fold root when the first `m`
/// Taylor coefficients of `p` are at rounding level at the simple root of
/// `p^(m-1)` near the group centroid; that root is the reported value.
/// Remaining values closer than `cluster_tol * (1 + |z|)` are merged.
pub fn cluster_roots(coeffs: &[C64], roots: &[C64], cluster_tol: f64) -> Vec<(C64, usize)> {
    let p = monic(coeffs);
    let mut remaining: Vec<C64> = roots.to_vec();
    remaining.sort_by(lex_cmp);
    let mut groups: Vec<(C64, usize)> = Vec::new();
    while !remaining.is_empty() {
        let seed = remaining[0];
        remaining.sort_by(|a, b| {
            (a - seed).norm().partial_cmp(&(b - seed).norm()).unwrap_or(core::cmp::Ordering::Equal)
        });
        let mut chosen = (seed, 1usize);
        for m in (2..=remaining.len()).rev() {
            let spread = (remaining[m - 1] - seed).norm();
            if spread > 0.1 * (1.0 + seed.norm()) {
                continue;
            }
            let centroid = remaining[..m].iter().sum::<C64>() / m as f64;
            let center = refine_multiple(&p, centroid, m, spread);
            let shifted = taylor_shift(&p, center);
            if (0..m).all(|j| shifted[j].norm() <= noise_level(&p, center, j)) {
                chosen = (center, m);
                break;
            }
        }
        if chosen.1 == 1 {
            chosen.0 = refine_multiple(&p, seed, 1, 0.0);
        }
        remaining.drain(..chosen.1);
        remaining.sort_by(lex_cmp);
        groups.push(chosen);
    }
    merge_close(groups, cluster_tol)
}

fn refine_multiple(p: &[C64], start: C64, m: usize, spread: f64) -> C64 {
    let q = nth_derivative(p, m - 1);
    let dq = derivative(&q);
    let refined = newton_polish(&q, &dq, start);
    if (refined - start).norm() <= 2.0 * spread + 1e-9 * (1.0 + start.norm()) {
        refined
    } else {
        start
    }
}

fn merge_close(mut groups: Vec<(C64, usize)>, tol: f64) -> Vec<(C64, usize)> {
    loop {
        let mut merged = false;
        'outer: for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let (a, ma) = groups[i];
                let (b, mb) = groups[j];
                if (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm())) {
                    let w = (a * ma as f64 + b * mb as f64) / (ma + mb) as f64;
                    groups[i] = (w, ma + mb);
                    groups.remove(j);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
    groups.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    groups
}

/// Lexicographic order on (re, im).
pub fn lex_cmp(a: &C64, b: &C64) -> core::cmp::Ordering {
    a.re.partial_cmp(&b.re)
        .unwrap_or(core::cmp::Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(core::cmp::Ordering::Equal))
}

/// Expands `prod (t - z_i)` into ascending coefficients.
pub fn from_roots(roots: &[C64]) -> Vec<C64> {
    let mut p = vec![r(1.0)];
    for z in roots {
        let mut next = vec![C64::zero(); p.len() + 1];
        for (i, a) in p.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * z;
        }
        p = next;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(lex_cmp);
        v
    }

    #[test]
    fn horner_and_derivatives() {
        let p = [r(1.0), r(-3.0), r(0.0), r(2.0)]; // 2t^3 - 3t + 1
        assert_eq!(eval(&p, r(2.0)), r(11.0));
        assert_eq!(derivative(&p), vec![r(-3.0), r(0.0), r(6.0)]);
        assert_eq!(nth_derivative(&p, 3), vec![r(12.0)]);
        assert!(nth_derivative(&p, 4).is_empty());
    }

    #[test]
    fn synthetic_division_exact() {
        let p = from_roots(&[r(1.0), r(2.0), c(0.0, 1.0)]);
        let (q, rem) = deflate(&p, r(1.0));
        assert!(rem.norm() < 1e-15);
        let expect = from_roots(&[r(2.0), c(0.0, 1.0)]);
        for (a, b) in q.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-14);
        }
        let (_, rem) = deflate(&p, r(3.0));
        assert!((rem - eval(&p, r(3.0))).norm() < 1e-12);
    }

    #[test]
    fn taylor_shift_matches_evaluation() {
        let p = from_roots(&[r(0.5), c(1.0, -2.0), r(-3.0)]);
        let center = c(0.3, 0.2);
        let q = taylor_shift(&p, center);
        for z in [r(0.0), c(0.1, 0.0), c(-0.4, 1.1)] {
            assert!((eval(&q, z) - eval(&p, center + z)).norm() < 1e-12);
        }
    }

    #[test]
    fn aberth_finds_simple_roots() {
        let rts = [r(0.0), r(0.3), r(1.0), c(-2.0, 0.5)];
        let found = sorted(aberth_roots(&from_roots(&rts)).unwrap());
        for (a, b) in found.iter().zip(sorted(rts.to_vec()).iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn companion_agrees_with_aberth() {
        let p = from_roots(&[r(1.5), c(0.2, -0.7), r(-1.0)]);
        let a = sorted(aberth_roots(&p).unwrap());
        let b = sorted(companion_roots(&p));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_polynomial_roots() {
        let mut p = vec![C64::zero(); 5];
        p[4] = r(1.0);
        assert_eq!(aberth_roots(&p).unwrap(), vec![C64::zero(); 4]);
    }

    #[test]
    fn clusters_multiple_roots() {
        let p = from_roots(&[r(1.0), r(1.0), r(1.0), r(0.3), r(0.0), r(0.0)]);
        let rts = roots(&p);
        let cl = cluster_roots(&p, &rts, 1e-6);
        assert_eq!(cl.len(), 3);
        let find = |v: f64| cl.iter().find(|(z, _)| (z - r(v)).norm() < 1e-9).map(|g| g.1);
        assert_eq!(find(1.0), Some(3));
        assert_eq!(find(0.3), Some(1));
        assert_eq!(find(0.0), Some(2));
    }

    #[test]
    fn high_multiplicity_unit_root() {
        let p = from_roots(&[r(1.0); 10]);
        let cl = cluster_roots(&p, &roots(&p), 1e-6);
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].1, 10);
        assert!((cl[0].0 - r(1.0)).norm() < 1e-10);
    }

    #[test]
    fn nearby_distinct_roots_stay_apart() {
        let p = from_roots(&[r(0.3), r(0.3001), r(1.0)]);
        let cl = cluster_roots(&p, &roots(&p), 1e-6);
        assert_eq!(cl.len(), 3);
    }
}
