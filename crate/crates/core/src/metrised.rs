//! Algebras of cubic forms: `<xy, z> = u(x, y, z)` for a nonsingular
//! symmetric bilinear form, and extremal idempotents in the Euclidean case.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{Float, Zero};

use crate::algebra::{Algebra, Element};
use crate::linalg::{self, Mat};
use crate::solve::{self, PathStatus, SolveConfig};
use crate::spectral::{IdempotentRecord, eigenspace};
use crate::{C64, Error, Result, r, rng};

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const METRISED_TOL: f64 = 1e-10;
pub const DEFAULT_STARTS: usize = 32;
const ASCENT_ITERS: usize = 200;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 40;

/// Symmetric trilinear tensor with `u(x) = (1/6) sum tri[i][j][k] x_i x_j x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicForm {
    dim: usize,
    tri: Vec<C64>,
}

impl CubicForm {
    /// Symmetrizes over all index permutations; an asymmetry above
    /// [`SYMMETRY_TOL`] is rejected.
    pub fn new(dim: usize, tri: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyAlgebra);
        }
        if tri.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim * dim, found: tri.len() });
        }
        if tri.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        let idx = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
        let mut sym = vec![C64::zero(); tri.len()];
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let perms = [idx(i, j, k), idx(i, k, j), idx(j, i, k), idx(j, k, i), idx(k, i, j), idx(k, j, i)];
                    let base = tri[idx(i, j, k)];
                    let mut acc = C64::zero();
                    for &p in &perms {
                        let asym = (tri[p] - base).norm();
                        if asym > SYMMETRY_TOL * (1.0 + base.norm().max(tri[p].norm())) {
                            return Err(Error::NotSymmetric { asymmetry: asym });
                        }
                        acc += tri[p];
                    }
                    sym[idx(i, j, k)] = acc / 6.0;
                }
            }
        }
        Ok(CubicForm { dim, tri: sym })
    }

    /// From monomials `coeff * prod x_i^{e_i}` of total degree three.
    pub fn from_monomials(dim: usize, monomials: &[(C64, Vec<u32>)]) -> Result<Self> {
        let mut tri = vec![C64::zero(); dim * dim * dim];
        for (coeff, exps) in monomials {
            if exps.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: exps.len() });
            }
            if exps.iter().sum::<u32>() != 3 {
                return Err(Error::InvalidParameter("cubic monomials must have degree 3".into()));
            }
            let mut idx: Vec<usize> = Vec::with_capacity(3);
            for (i, &e) in exps.iter().enumerate() {
                idx.extend(core::iter::repeat_n(i, e as usize));
            }
            let orderings = distinct_orderings(&idx);
            // Each ordering contributes tri/6 to the coefficient.
            let entry = coeff * 6.0 / orderings.len() as f64;
            for (a, b, c) in orderings {
                tri[(a * dim + b) * dim + c] += entry;
            }
        }
        CubicForm::new(dim, tri)
    }

    pub fn zero(dim: usize) -> Self {
        CubicForm { dim, tri: vec![C64::zero(); dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tri(&self) -> &[C64] {
        &self.tri
    }

    pub fn entry(&self, i: usize, j: usize, k: usize) -> C64 {
        self.tri[(i * self.dim + j) * self.dim + k]
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.tri.iter().all(|v| v.norm() <= tol)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.tri.iter().all(|v| v.im.abs() <= tol * (1.0 + v.re.abs()))
    }

    /// `u(x)`.
    pub fn value(&self, x: &[C64]) -> C64 {
        let n = self.dim;
        let mut acc = C64::zero();
        for i in 0..n {
            for j in 0..n {
                let w = x[i] * x[j];
                for k in 0..n {
                    acc += self.tri[(i * n + j) * n + k] * w * x[k];
                }
            }
        }
        acc / 6.0
    }

    /// `grad u(x)_i = (1/2) sum_jk tri[i][j][k] x_j x_k`.
    pub fn gradient(&self, x: &[C64]) -> Vec<C64> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                let mut acc = C64::zero();
                for j in 0..n {
                    for k in 0..n {
                        acc += self.tri[(i * n + j) * n + k] * x[j] * x[k];
                    }
                }
                acc * 0.5
            })
            .collect()
    }
}

fn distinct_orderings(idx: &[usize]) -> Vec<(usize, usize, usize)> {
    let (a, b, c) = (idx[0], idx[1], idx[2]);
    let mut all = vec![(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)];
    all.sort_unstable();
    all.dedup();
    all
}

/// Nonsingular symmetric bilinear form `<x, y> = x^T B y` (no conjugation).
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProduct {
    matrix: Mat,
    euclidean: bool,
}

impl InnerProduct {
    pub fn euclidean(n: usize) -> Self {
        InnerProduct { matrix: Mat::identity(n), euclidean: true }
    }

    pub fn new(matrix: Mat) -> Result<Self> {
        let n = matrix.rows();
        if matrix.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.cols() });
        }
        let asym = matrix.sub(&matrix.transpose()).max_abs();
        if asym > SYMMETRY_TOL * (1.0 + matrix.max_abs()) {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        if !(linalg::det(&matrix).norm() > 1e-12) {
            return Err(Error::SingularInnerProduct);
        }
        let euclidean = matrix == Mat::identity(n);
        Ok(InnerProduct { matrix, euclidean })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn is_euclidean(&self) -> bool {
        self.euclidean
    }

    pub fn apply(&self, x: &[C64], y: &[C64]) -> C64 {
        linalg::dot(x, &self.matrix.mul_vec(y))
    }
}

fn check_dims(a: usize, b: &InnerProduct) -> Result<()> {
    if b.dim() != a {
        return Err(Error::DimensionMismatch { expected: a, found: b.dim() });
    }
    Ok(())
}

/// The algebra with `<xy, z>_B = u(x, y, z)`: `c[i][j][.] = B^{-1} tri[i][j][.]`.
pub fn algebra_from_cubic(u: &CubicForm, b: &InnerProduct) -> Result<Algebra> {
    let n = u.dim();
    check_dims(n, b)?;
    if b.is_euclidean() {
        return Algebra::new(n, u.tri.clone());
    }
    let inv = linalg::inverse(b.matrix()).ok_or(Error::SingularInnerProduct)?;
    Algebra::from_fn(n, |i, j, k| (0..n).map(|l| inv[(k, l)] * u.entry(i, j, l)).sum())
}

/// `max |<e_i e_j, e_k> - <e_i, e_j e_k>|` over basis triples.
pub fn metrised_violation(a: &Algebra, b: &InnerProduct) -> Result<f64> {
    let n = a.dim();
    check_dims(n, b)?;
    // t[i][j][k] = <e_i e_j, e_k> = sum_l c[i][j][l] B[l][k].
    let t = |i: usize, j: usize, k: usize| -> C64 { (0..n).map(|l| a.structure(i, j, l) * b.matrix()[(l, k)]).sum() };
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // <e_i, e_j e_k> = <e_j e_k, e_i> by symmetry of B.
                worst = worst.max((t(i, j, k) - t(j, k, i)).norm());
            }
        }
    }
    Ok(worst)
}

/// Whether `<xy, z> = <x, yz>` holds, and the largest violation.
pub fn metrised_check(a: &Algebra, b: &InnerProduct) -> Result<(bool, f64)> {
    let v = metrised_violation(a, b)?;
    Ok((v < METRISED_TOL, v))
}

/// `tri[i][j][k] = <e_i e_j, e_k>_B`.
pub fn cubic_from_algebra(a: &Algebra, b: &InnerProduct) -> Result<CubicForm> {
    let (ok, violation) = metrised_check(a, b)?;
    if !ok {
        return Err(Error::FormNotAssociative { violation });
    }
    let n = a.dim();
    let mut tri = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                tri.push((0..n).map(|l| a.structure(i, j, l) * b.matrix()[(l, k)]).sum());
            }
        }
    }
    // Associativity makes the tensor symmetric up to the check tolerance;
    // symmetrize exactly so that the round trip is not rejected.
    CubicForm::new(n, symmetrize_loose(n, &tri))
}

fn symmetrize_loose(n: usize, tri: &[C64]) -> Vec<C64> {
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let mut out = vec![C64::zero(); tri.len()];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let s: C64 = [idx(i, j, k), idx(i, k, j), idx(j, i, k), idx(j, k, i), idx(k, i, j), idx(k, j, i)]
                    .iter()
                    .map(|&p| tri[p])
                    .sum();
                out[idx(i, j, k)] = s / 6.0;
            }
        }
    }
    out
}

/// `f(x) = <x^2, x> / |x|^3` with the bilinear `|x|^2 = sum x_i^2`.
pub fn objective(u: &CubicForm, x: &[C64]) -> C64 {
    let rho = linalg::dot(x, x);
    u.value(x) * 6.0 / (rho * rho.sqrt())
}

/// `Df = 3 (x^2 |x|^2 - <x^2, x> x) / |x|^5`.
pub fn objective_gradient(u: &CubicForm, x: &[C64]) -> Vec<C64> {
    let rho = linalg::dot(x, x);
    let sq: Vec<C64> = u.gradient(x).iter().map(|g| g * 2.0).collect();
    let nn = linalg::dot(&sq, x);
    let denom = rho * rho * rho.sqrt();
    sq.iter().zip(x).map(|(s, xi)| (s * rho - nn * xi) * 3.0 / denom).collect()
}

/// `D^2 f = 3 [2|x|^4 L_x - N |x|^2 I - 3|x|^2 (x^2 x^T + x (x^2)^T) + 5 N x x^T] / |x|^7`
/// with `N = <x^2, x>`.
pub fn objective_hessian(u: &CubicForm, x: &[C64]) -> Mat {
    let n = u.dim();
    let rho = linalg::dot(x, x);
    let sq: Vec<C64> = u.gradient(x).iter().map(|g| g * 2.0).collect();
    let nn = linalg::dot(&sq, x);
    let l = Mat::from_fn(n, n, |i, j| (0..n).map(|k| u.entry(i, j, k) * x[k]).sum());
    let denom = rho * rho * rho * rho.sqrt();
    Mat::from_fn(n, n, |i, j| {
        let mut v = l[(i, j)] * rho * rho * 2.0 - (sq[i] * x[j] + x[i] * sq[j]) * rho * 3.0 + nn * x[i] * x[j] * 5.0;
        if i == j {
            v -= nn * rho;
        }
        v * 3.0 / denom
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalResult {
    pub record: IdempotentRecord,
    /// Best value of `f` on the unit sphere.
    pub f_value: f64,
    /// The maximizer `y` on the sphere (`c = y / f_value` before refinement).
    pub direction: Vec<f64>,
    /// `max Re(sigma(c) \ {1})`.
    pub max_re_nontrivial: f64,
    /// `max Re(sigma(c) \ {1}) <= 1/2 + 1e-8`.
    pub half_bound_holds: bool,
    pub one_is_simple: bool,
    pub starts: usize,
}

fn real_objective(u: &CubicForm, x: &[f64]) -> f64 {
    let xc: Vec<C64> = x.iter().map(|&v| r(v)).collect();
    objective(u, &xc).re
}

fn real_gradient(u: &CubicForm, x: &[f64]) -> Vec<f64> {
    let xc: Vec<C64> = x.iter().map(|&v| r(v)).collect();
    objective_gradient(u, &xc).iter().map(|g| g.re).collect()
}

fn normalized(x: &[f64]) -> Vec<f64> {
    let nx = Float::sqrt(x.iter().map(|v| v * v).sum::<f64>());
    x.iter().map(|v| v / nx).collect()
}

/// Projected gradient ascent of `f` on the unit sphere with Armijo
/// backtracking (initial step 1, factor 1/2).
pub fn sphere_ascent(u: &CubicForm, start: &[f64]) -> (Vec<f64>, f64) {
    let mut x = normalized(start);
    let mut fx = real_objective(u, &x);
    for _ in 0..ASCENT_ITERS {
        let g = real_gradient(u, &x);
        // f is homogeneous of degree zero, so g is already tangent.
        let gg: f64 = g.iter().map(|v| v * v).sum();
        if !(gg > 1e-30) {
            break;
        }
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..MAX_HALVINGS {
            let y: Vec<f64> = normalized(&x.iter().zip(&g).map(|(a, b)| a + t * b).collect::<Vec<_>>());
            let fy = real_objective(u, &y);
            if fy >= fx + ARMIJO * t * gg {
                x = y;
                fx = fy;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (x, fx)
}

/// Rescaled global maximizer of `f` over `starts` random starts, refined to
/// an idempotent of the Euclidean algebra of `u`.
pub fn extremal_idempotent(u: &CubicForm, starts: usize, seed: u64) -> Result<ExtremalResult> {
    let n = u.dim();
    if u.is_zero(1e-14) {
        return Err(Error::ZeroForm);
    }
    if !u.is_real(1e-14) {
        return Err(Error::ComplexForm);
    }
    if starts == 0 {
        return Err(Error::InvalidParameter("at least one start is required".into()));
    }
    let a = algebra_from_cubic(u, &InnerProduct::euclidean(n))?;
    let mut gen = rng::seeded(seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..starts {
        let start: Vec<f64> = (0..n).map(|_| rng::real_gaussian(&mut gen)).collect();
        let (y, fy) = sphere_ascent(u, &start);
        let better = match &best {
            None => true,
            Some((by, bf)) => match fy.partial_cmp(bf) {
                Some(Ordering::Greater) => true,
                Some(Ordering::Equal) => y.partial_cmp(by) == Some(Ordering::Less),
                _ => false,
            },
        };
        if better {
            best = Some((y, fy));
        }
    }
    let (y, k) = best.expect("starts > 0");
    if !(k > 0.0) {
        return Err(Error::AllStartsNegative);
    }
    let cfg = SolveConfig::default();
    let guess = Element::new(y.iter().map(|&v| r(v / k)).collect());
    let end = solve::newton_refine(&a, &guess, &cfg);
    if end.status != PathStatus::Converged {
        return Err(Error::NotIdempotent { residual: end.residual });
    }
    let point = Element::new(end.point.coords().iter().map(|v| r(v.re)).collect());
    let record = IdempotentRecord::new(&a, point, &cfg);
    let mut roots = record.spectrum.multiset();
    let one = (0..roots.len())
        .min_by(|&i, &j| (roots[i] - 1.0).norm().partial_cmp(&(roots[j] - 1.0).norm()).unwrap_or(Ordering::Equal))
        .expect("nonempty spectrum");
    roots.remove(one);
    let max_re = roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let one_is_simple = record.spectrum.multiplicity_of(r(1.0), cfg.cluster_tol) == 1;
    Ok(ExtremalResult {
        half_bound_holds: max_re <= 0.5 + 1e-8,
        max_re_nontrivial: max_re,
        one_is_simple,
        record,
        f_value: k,
        direction: y,
        starts,
    })
}

/// `max |<z_a z_b, z_d>_B|` over an orthonormal basis of `A_c(1/2)`.
pub fn fusion_check(a: &Algebra, b: &InnerProduct, c: &IdempotentRecord, cfg: &SolveConfig) -> Result<f64> {
    check_dims(a.dim(), b)?;
    let half = r(0.5);
    let distance = c.spectrum.distance_to(half);
    if distance > cfg.cluster_tol {
        return Err(Error::HalfNotInSpectrum { distance });
    }
    // An eigenvalue at distance d from 1/2 leaves a singular value of order d.
    let basis = eigenspace(a, &c.point, half, cfg.rank_tol.max(10.0 * distance))?;
    if basis.is_empty() {
        return Err(Error::HalfNotInSpectrum { distance });
    }
    let mut worst = 0.0f64;
    for za in &basis {
        for zb in &basis {
            let prod = a.product_slice(za, zb);
            for zd in &basis {
                worst = worst.max(b.apply(&prod, zd).norm());
            }
        }
    }
    Ok(worst)
}
