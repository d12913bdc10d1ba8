//! Idempotents and 2-nilpotents by total-degree homotopy continuation.
//!
//! The idempotent equation `x^2 = x` is tracked in projective coordinates
//! `X = (x0, x)`, i.e. as `Psi(x) - x0 x = 0` on a random affine chart
//! `<b, X> = 1`. Paths that would diverge in affine space stay bounded and
//! end at `x0 = 0`, which is exactly where the 2-nilpotent directions live.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{Float, Zero};

use crate::algebra::{Algebra, Element};
use crate::linalg::{self, Lu, Mat, Svd};
use crate::rng::{self, SeededRng};
use crate::spectral::IdempotentRecord;
use crate::{C64, Error, MAX_SOLVER_DIM, Result, poly, r};

/// Tracking is abandoned (and the path counted as failed) after this many
/// predictor-corrector attempts.
const MAX_STEPS: usize = 20_000;
/// A path that stalls beyond this homotopy time is finished by the endgame.
const ENDGAME_START: f64 = 0.95;
const MAX_CORRECTOR: usize = 4;
const ENDGAME_ITERS: usize = 100;
/// Endpoints whose Jacobian is smaller than this are probed for a family.
pub const SINGULAR_TOL: f64 = 1e-8;
const FAMILY_PROBES: usize = 4;
const FAMILY_KICK: f64 = 1e-3;
const FAMILY_SEPARATION: f64 = 1e-5;
const CHART_RETRIES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub seed: u64,
    pub track_tol: f64,
    pub ds_init: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    pub divergence_norm: f64,
    pub dedup_tol: f64,
    pub refine_tol: f64,
    pub max_newton: usize,
    /// Root clustering and Peirce-number identification.
    pub cluster_tol: f64,
    /// Kernel dimension threshold, relative to the largest singular value.
    pub rank_tol: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            seed: 0,
            track_tol: 1e-10,
            ds_init: 0.02,
            ds_min: 1e-10,
            ds_max: 0.1,
            divergence_norm: 1e8,
            dedup_tol: 1e-6,
            refine_tol: 1e-12,
            max_newton: 50,
            cluster_tol: 1e-6,
            rank_tol: 1e-8,
        }
    }
}

impl SolveConfig {
    pub fn with_seed(seed: u64) -> Self {
        SolveConfig { seed, ..SolveConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if !(self.ds_min > 0.0 && self.ds_min <= self.ds_init && self.ds_init <= self.ds_max && self.ds_max < 1.0) {
            return bad("step bounds must satisfy 0 < ds_min <= ds_init <= ds_max < 1");
        }
        let tols = [
            self.track_tol,
            self.divergence_norm,
            self.dedup_tol,
            self.refine_tol,
            self.cluster_tol,
            self.rank_tol,
        ];
        if !tols.iter().all(|t| t.is_finite() && *t > 0.0) {
            return bad("tolerances must be positive and finite");
        }
        if self.max_newton == 0 {
            return bad("max_newton must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStatus {
    Converged,
    AtInfinity,
    Failed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathEndpoint {
    pub status: PathStatus,
    /// Refined solution, or the unit direction of `x` for endpoints at infinity.
    pub point: Element,
    pub residual: f64,
    pub jacobian_min_singular_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdempotentSet {
    pub algebra: Algebra,
    pub config: SolveConfig,
    /// Distinct idempotents, zero first, then in lexicographic order.
    pub idempotents: Vec<IdempotentRecord>,
    /// One unit-norm witness per component of 2-nilpotent directions.
    pub nilpotent_directions: Vec<Element>,
    /// Some nilpotent component is positive-dimensional.
    pub has_nilpotent_family: bool,
    pub paths_total: usize,
    pub paths_failed: usize,
    pub paths_at_infinity: usize,
    pub exhaustive: bool,
    pub has_infinite_family: bool,
    /// Per-path endpoints in start-point order (empty for closed-form sets).
    pub endpoints: Vec<PathEndpoint>,
}

impl IdempotentSet {
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn count(&self) -> usize {
        self.idempotents.len()
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &IdempotentRecord> {
        self.idempotents.iter().filter(|rec| !rec.is_zero())
    }

    pub fn zero(&self) -> Option<&IdempotentRecord> {
        self.idempotents.iter().find(|rec| rec.is_zero())
    }
}

/// Homogeneous quadratic target system on `m + 1` projective unknowns.
trait Target {
    fn equations(&self) -> usize;
    /// Values (length m) and Jacobian (m x (m+1)).
    fn eval(&self, x: &[C64]) -> (Vec<C64>, Mat);
}

/// `Psi(x) - x0 x` with `X = (x0, x)`.
struct IdempotentTarget<'a> {
    algebra: &'a Algebra,
}

impl Target for IdempotentTarget<'_> {
    fn equations(&self) -> usize {
        self.algebra.dim()
    }

    fn eval(&self, big: &[C64]) -> (Vec<C64>, Mat) {
        let n = self.algebra.dim();
        let x0 = big[0];
        let x = &big[1..];
        let sq = self.algebra.product_slice(x, x);
        let l = self.algebra.left_mult_slice(x);
        let f = (0..n).map(|i| sq[i] - x0 * x[i]).collect();
        let jac = Mat::from_fn(n, n + 1, |i, j| {
            if j == 0 {
                -x[i]
            } else if i == j - 1 {
                l[(i, j - 1)] * 2.0 - x0
            } else {
                l[(i, j - 1)] * 2.0
            }
        });
        (f, jac)
    }
}

/// `R Psi(y0 p + N y)`: the nilpotent equations on the chart `<a, x> = 1`,
/// squared up by a random `(n-1) x n` matrix `R`.
struct NilpotentTarget<'a> {
    algebra: &'a Algebra,
    chart: Chart,
    mix: Mat,
}

impl Target for NilpotentTarget<'_> {
    fn equations(&self) -> usize {
        self.algebra.dim() - 1
    }

    fn eval(&self, big: &[C64]) -> (Vec<C64>, Mat) {
        let z = self.chart.lift(big[0], &big[1..]);
        let sq = self.algebra.product_slice(&z, &z);
        let l2 = self.algebra.left_mult_slice(&z).scale(r(2.0));
        let full = l2.mul_mat(&self.chart.frame);
        (self.mix.mul_vec(&sq), self.mix.mul_mat(&full))
    }
}

/// Affine chart `<a, x> = 1` parametrised as `x = y0 p + N y`.
#[derive(Debug, Clone)]
struct Chart {
    /// Columns `[p | N]`, n x n.
    frame: Mat,
}

impl Chart {
    fn new(a: &[C64]) -> Option<Chart> {
        let n = a.len();
        let na = linalg::norm(a);
        if !(na > 1e-12) {
            return None;
        }
        let p: Vec<C64> = a.iter().map(|v| v.conj() / (na * na)).collect();
        let row = Mat::from_fn(1, n, |_, j| a[j]);
        let svd = Svd::new(&row);
        let kernel = svd.kernel(1e-12 * na);
        if kernel.len() != n - 1 {
            return None;
        }
        let frame = Mat::from_fn(n, n, |i, j| if j == 0 { p[i] } else { kernel[j - 1][i] });
        Some(Chart { frame })
    }

    fn lift(&self, y0: C64, y: &[C64]) -> Vec<C64> {
        let n = self.frame.rows();
        (0..n)
            .map(|i| {
                let mut v = self.frame[(i, 0)] * y0;
                for (j, yj) in y.iter().enumerate() {
                    v += self.frame[(i, j + 1)] * yj;
                }
                v
            })
            .collect()
    }
}

/// `H(X, s) = (1 - s) gamma (x_i^2 - x0^2) + s F(X)` with the chart row
/// `<b, X> - 1`.
struct Homotopy<'a, T: Target> {
    target: &'a T,
    gamma: C64,
    chart: Vec<C64>,
}

impl<T: Target> Homotopy<'_, T> {
    /// Values, Jacobian in X and derivative in s.
    fn eval(&self, x: &[C64], s: f64) -> (Vec<C64>, Mat, Vec<C64>) {
        let m = self.target.equations();
        let (f, df) = self.target.eval(x);
        let w = self.gamma * (1.0 - s);
        let mut h = Vec::with_capacity(m + 1);
        let mut dh = Vec::with_capacity(m + 1);
        let mut jac = Mat::zeros(m + 1, m + 1);
        for i in 0..m {
            let g = x[i + 1] * x[i + 1] - x[0] * x[0];
            h.push(w * g + f[i] * s);
            dh.push(f[i] - self.gamma * g);
            for j in 0..=m {
                jac[(i, j)] = df[(i, j)] * s;
            }
            jac[(i, 0)] -= w * x[0] * 2.0;
            jac[(i, i + 1)] += w * x[i + 1] * 2.0;
        }
        h.push(linalg::dot(&self.chart, x) - 1.0);
        dh.push(C64::zero());
        for j in 0..=m {
            jac[(m, j)] = self.chart[j];
        }
        (h, jac, dh)
    }

    fn start_points(&self) -> Vec<Vec<C64>> {
        let m = self.target.equations();
        (0..1usize << m)
            .map(|mask| {
                let mut v = vec![r(1.0); m + 1];
                for i in 0..m {
                    if mask >> i & 1 == 1 {
                        v[i + 1] = r(-1.0);
                    }
                }
                let scale = linalg::dot(&self.chart, &v);
                v.iter().map(|z| z / scale).collect()
            })
            .collect()
    }

    fn correct(&self, mut x: Vec<C64>, s: f64, tol: f64) -> Option<Vec<C64>> {
        let mut prev = f64::INFINITY;
        for _ in 0..MAX_CORRECTOR {
            let (h, jac, _) = self.eval(&x, s);
            let neg: Vec<C64> = h.iter().map(|v| -v).collect();
            let dx = Lu::new(&jac)?.solve(&neg);
            let step = linalg::norm(&dx);
            if !step.is_finite() || step > 0.5 * prev {
                return None;
            }
            for (xi, d) in x.iter_mut().zip(&dx) {
                *xi += d;
            }
            let scale = 1.0 + linalg::norm(&x);
            if prev.is_infinite() && step > 0.1 * scale {
                return None;
            }
            if step <= tol * scale {
                return Some(x);
            }
            prev = step;
        }
        None
    }

    /// Tracks from `s = 0` to `s = 1`; `None` when the path fails.
    fn track(&self, start: Vec<C64>, cfg: &SolveConfig) -> Option<Vec<C64>> {
        let mut x = start;
        let mut s = 0.0;
        let mut ds = cfg.ds_init;
        let mut streak = 0;
        for _ in 0..MAX_STEPS {
            if s >= 1.0 {
                break;
            }
            let last = ds >= 1.0 - s;
            let h = if last { 1.0 - s } else { ds };
            let (_, jac, dh) = self.eval(&x, s);
            let neg: Vec<C64> = dh.iter().map(|v| -v).collect();
            let next = Lu::new(&jac).and_then(|lu| {
                let dx = lu.solve(&neg);
                let pred: Vec<C64> = x.iter().zip(&dx).map(|(a, d)| a + d * h).collect();
                self.correct(pred, if last { 1.0 } else { s + h }, cfg.track_tol)
            });
            match next {
                Some(xn) => {
                    x = xn;
                    s = if last { 1.0 } else { s + h };
                    streak += 1;
                    if streak >= 4 {
                        ds = (ds * 1.5).min(cfg.ds_max);
                        streak = 0;
                    }
                }
                None => {
                    ds *= 0.5;
                    streak = 0;
                    if ds < cfg.ds_min {
                        break;
                    }
                }
            }
        }
        if s >= 1.0 || s > ENDGAME_START { Some(self.endgame(x)) } else { None }
    }

    /// Gauss–Newton at `s = 1` with a pseudo-inverse, so that singular
    /// endpoints converge (linearly) instead of blowing up.
    fn endgame(&self, mut x: Vec<C64>) -> Vec<C64> {
        for _ in 0..ENDGAME_ITERS {
            let (h, jac, _) = self.eval(&x, 1.0);
            let neg: Vec<C64> = h.iter().map(|v| -v).collect();
            let dx = Svd::new(&jac).solve(&neg, 1e-9);
            let step = linalg::norm(&dx);
            if !step.is_finite() {
                break;
            }
            for (xi, d) in x.iter_mut().zip(&dx) {
                *xi += d;
            }
            if step <= 1e-14 * (1.0 + linalg::norm(&x)) {
                break;
            }
        }
        x
    }
}

fn check_dim(a: &Algebra) -> Result<()> {
    if a.dim() > MAX_SOLVER_DIM {
        return Err(Error::DimensionTooLarge { dim: a.dim(), max: MAX_SOLVER_DIM });
    }
    Ok(())
}

/// `x^2 - x`.
fn idempotent_defect(a: &Algebra, x: &[C64]) -> Vec<C64> {
    let sq = a.product_slice(x, x);
    sq.iter().zip(x).map(|(s, v)| s - v).collect()
}

fn jacobian(a: &Algebra, x: &[C64]) -> Mat {
    a.left_mult_slice(x).scale(r(2.0)).shifted(r(1.0))
}

/// Newton's method on `f(x) = x^2 - x` with Jacobian `2 L_x - I`.
pub fn newton_refine(a: &Algebra, x: &Element, cfg: &SolveConfig) -> PathEndpoint {
    let mut x = x.coords().to_vec();
    let mut status = PathStatus::Failed;
    let mut residual = f64::INFINITY;
    for it in 0..=cfg.max_newton {
        let f = idempotent_defect(a, &x);
        residual = linalg::norm(&f);
        let size = linalg::norm(&x);
        if !(residual.is_finite() && size.is_finite()) || size > cfg.divergence_norm {
            break;
        }
        if residual < cfg.refine_tol * (1.0 + size) {
            status = PathStatus::Converged;
            break;
        }
        if it == cfg.max_newton {
            break;
        }
        let jac = jacobian(a, &x);
        let neg: Vec<C64> = f.iter().map(|v| -v).collect();
        let dx = Lu::new(&jac)
            .map(|lu| lu.solve(&neg))
            .filter(|dx| dx.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
            .unwrap_or_else(|| Svd::new(&jac).solve(&neg, 1e-12));
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
    }
    let jacobian_min_singular_value =
        if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) { linalg::min_singular_value(&jacobian(a, &x)) } else { 0.0 };
    PathEndpoint { status, point: Element::new(x), residual, jacobian_min_singular_value }
}

/// Gauss–Newton with a pseudo-inverse; converges onto a solution manifold
/// along its normal space.
fn gauss_newton_idempotent(a: &Algebra, mut x: Vec<C64>) -> Vec<C64> {
    for _ in 0..ENDGAME_ITERS {
        let f = idempotent_defect(a, &x);
        let neg: Vec<C64> = f.iter().map(|v| -v).collect();
        let dx = Svd::new(&jacobian(a, &x)).solve(&neg, 1e-10);
        let step = linalg::norm(&dx);
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
        if !(step > 1e-15 * (1.0 + linalg::norm(&x))) {
            break;
        }
    }
    x
}

fn random_vector(rng: &mut SeededRng, n: usize) -> Vec<C64> {
    (0..n).map(|_| rng::complex_gaussian(rng)).collect()
}

/// Kicks `x` in random directions and re-converges; a landing point away
/// from `x` means `x` sits on a positive-dimensional solution set.
fn probe_family(
    x: &[C64],
    rng: &mut SeededRng,
    resolve: impl Fn(Vec<C64>) -> Option<Vec<C64>>,
    same: impl Fn(&[C64], &[C64]) -> f64,
) -> bool {
    let scale = 1.0 + linalg::norm(x);
    for _ in 0..FAMILY_PROBES {
        let dir = random_vector(rng, x.len());
        let nd = linalg::norm(&dir);
        let kicked: Vec<C64> = x.iter().zip(&dir).map(|(v, d)| v + d * (FAMILY_KICK * scale / nd)).collect();
        if let Some(y) = resolve(kicked) {
            if same(x, &y) > FAMILY_SEPARATION * scale {
                return true;
            }
        }
    }
    false
}

fn lex_cmp_vec(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = poly::lex_cmp(x, y);
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut root = i;
    while parent[root] != root {
        root = parent[root];
    }
    let mut k = i;
    while parent[k] != root {
        let next = parent[k];
        parent[k] = root;
        k = next;
    }
    root
}

/// Union-find clusters (as index lists, in input order) under `close`.
fn clusters(len: usize, close: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..len).collect();
    for i in 0..len {
        for j in i + 1..len {
            if close(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; len];
    for i in 0..len {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

/// Unit-norm representative with the first (near-)largest coordinate made
/// real and positive.
pub fn normalize_direction(v: &[C64]) -> Element {
    let nv = linalg::norm(v);
    let big = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v.iter().find(|z| z.norm() >= (1.0 - 1e-6) * big).copied().unwrap_or(r(1.0));
    let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { r(1.0) };
    Element::new(v.iter().map(|z| z * phase / nv).collect())
}

/// `sqrt(1 - |<u, v>|^2)` for unit vectors: zero iff they span one line.
pub fn direction_distance(u: &Element, v: &Element) -> f64 {
    let ip = linalg::dot_h(u.coords(), v.coords()).norm() / (u.norm() * v.norm());
    Float::sqrt((1.0 - ip * ip).max(0.0))
}

pub fn solve_idempotents(a: &Algebra, cfg: &SolveConfig) -> Result<IdempotentSet> {
    check_dim(a)?;
    cfg.validate()?;
    let n = a.dim();
    let mut rng = rng::seeded(cfg.seed);
    let target = IdempotentTarget { algebra: a };
    let homotopy = Homotopy { target: &target, gamma: rng::unit_complex(&mut rng), chart: random_vector(&mut rng, n + 1) };

    let mut endpoints = Vec::with_capacity(1 << n);
    for start in homotopy.start_points() {
        let end = match homotopy.track(start, cfg) {
            None => PathEndpoint {
                status: PathStatus::Failed,
                point: Element::zeros(n),
                residual: f64::INFINITY,
                jacobian_min_singular_value: 0.0,
            },
            Some(big) => {
                let rest = &big[1..];
                let size = linalg::norm(rest);
                if big[0].norm() * cfg.divergence_norm <= size {
                    PathEndpoint {
                        status: PathStatus::AtInfinity,
                        point: normalize_direction(rest),
                        residual: 0.0,
                        jacobian_min_singular_value: 0.0,
                    }
                } else {
                    let x: Vec<C64> = rest.iter().map(|v| v / big[0]).collect();
                    newton_refine(a, &Element::new(x), cfg)
                }
            }
        };
        endpoints.push(end);
    }

    let paths_failed = endpoints.iter().filter(|e| e.status == PathStatus::Failed).count();
    let paths_at_infinity = endpoints.iter().filter(|e| e.status == PathStatus::AtInfinity).count();

    let mut finite: Vec<&PathEndpoint> = endpoints.iter().filter(|e| e.status == PathStatus::Converged).collect();
    finite.sort_by(|x, y| lex_cmp_vec(x.point.coords(), y.point.coords()));
    let groups = clusters(finite.len(), |i, j| {
        let (x, y) = (&finite[i].point, &finite[j].point);
        x.dist(y) <= cfg.dedup_tol * (1.0 + x.norm().max(y.norm()))
    });

    let mut family_rng = rng::seeded(cfg.seed ^ 0x5eed_fa31);
    let mut has_infinite_family = false;
    let mut records = Vec::with_capacity(groups.len() + 1);
    for group in &groups {
        let best = group
            .iter()
            .copied()
            .min_by(|&i, &j| finite[i].residual.partial_cmp(&finite[j].residual).unwrap_or(Ordering::Equal))
            .unwrap_or(group[0]);
        let end = finite[best];
        let mut rec = IdempotentRecord::new(a, end.point.clone(), cfg);
        rec.multiplicity_estimate = group.len();
        if end.jacobian_min_singular_value < SINGULAR_TOL {
            let on_family = probe_family(
                end.point.coords(),
                &mut family_rng,
                |kicked| {
                    let y = gauss_newton_idempotent(a, kicked);
                    let res = linalg::norm(&idempotent_defect(a, &y));
                    (res < 1e-10 * (1.0 + linalg::norm(&y))).then_some(y)
                },
                linalg::dist,
            );
            rec.on_family = on_family;
            has_infinite_family |= on_family;
        }
        records.push(rec);
    }
    if !records.iter().any(|rec| rec.is_zero()) {
        records.push(IdempotentRecord::new(a, Element::zeros(n), cfg));
    }
    sort_records(&mut records);

    let nil = nilpotent_search(a, cfg);
    Ok(IdempotentSet {
        algebra: a.clone(),
        config: cfg.clone(),
        idempotents: records,
        nilpotent_directions: nil.directions,
        has_nilpotent_family: nil.has_family,
        paths_total: 1 << n,
        paths_failed,
        paths_at_infinity,
        exhaustive: paths_failed == 0 && !nil.degenerate,
        has_infinite_family,
        endpoints,
    })
}

fn sort_records(records: &mut [IdempotentRecord]) {
    records.sort_by(|x, y| {
        y.is_zero().cmp(&x.is_zero()).then_with(|| lex_cmp_vec(x.point.coords(), y.point.coords()))
    });
}

struct NilpotentSearch {
    directions: Vec<Element>,
    has_family: bool,
    degenerate: bool,
}

/// Unit-normalized 2-nilpotent directions, one witness per component.
///
/// Fails with [`Error::ChartDegenerate`] when every chart tried (the first
/// plus three retries) lost a path.
pub fn detect_nilpotents(a: &Algebra, cfg: &SolveConfig) -> Result<Vec<Element>> {
    check_dim(a)?;
    cfg.validate()?;
    let nil = nilpotent_search(a, cfg);
    if nil.degenerate { Err(Error::ChartDegenerate) } else { Ok(nil.directions) }
}

/// Like [`detect_nilpotents`], also reporting whether some component is
/// positive-dimensional.
pub fn detect_nilpotent_components(a: &Algebra, cfg: &SolveConfig) -> Result<(Vec<Element>, bool)> {
    check_dim(a)?;
    cfg.validate()?;
    let nil = nilpotent_search(a, cfg);
    if nil.degenerate { Err(Error::ChartDegenerate) } else { Ok((nil.directions, nil.has_family)) }
}

fn nilpotent_search(a: &Algebra, cfg: &SolveConfig) -> NilpotentSearch {
    let n = a.dim();
    let scale = 1.0 + a.tensor().iter().map(|v| v.norm()).fold(0.0, f64::max);
    if n == 1 {
        let nil = a.structure(0, 0, 0).norm() <= 1e-12 * scale;
        return NilpotentSearch {
            directions: if nil { vec![Element::basis(1, 0)] } else { vec![] },
            has_family: false,
            degenerate: false,
        };
    }
    let mut rng = rng::seeded(cfg.seed ^ 0x0071_1907);
    let mut fallback = None;
    for _attempt in 0..=CHART_RETRIES {
        let Some(chart) = Chart::new(&random_vector(&mut rng, n)) else { continue };
        let mix = Mat::from_fn(n - 1, n, |_, _| rng::complex_gaussian(&mut rng));
        let target = NilpotentTarget { algebra: a, chart, mix };
        let homotopy = Homotopy { target: &target, gamma: rng::unit_complex(&mut rng), chart: random_vector(&mut rng, n) };
        let mut failed = 0;
        let mut found: Vec<Vec<C64>> = Vec::new();
        for start in homotopy.start_points() {
            let Some(big) = homotopy.track(start, cfg) else {
                failed += 1;
                continue;
            };
            let size = linalg::norm(&big[1..]);
            if big[0].norm() * cfg.divergence_norm <= size {
                continue;
            }
            let y: Vec<C64> = big[1..].iter().map(|v| v / big[0]).collect();
            let y = gauss_newton_nilpotent(a, &target.chart, y);
            let x = target.chart.lift(r(1.0), &y);
            let unit = normalize_direction(&x);
            let res = linalg::norm(&a.product_slice(unit.coords(), unit.coords()));
            if res <= 1e-9 * scale {
                found.push(y);
            }
        }
        let result = nilpotent_components(a, &target.chart, found, scale, &mut rng);
        if failed == 0 {
            return result;
        }
        fallback.get_or_insert(result);
    }
    let mut result = fallback.unwrap_or(NilpotentSearch { directions: vec![], has_family: false, degenerate: true });
    result.degenerate = true;
    result
}

/// Gauss–Newton on the full (overdetermined) system `Psi(p + N y) = 0`.
fn gauss_newton_nilpotent(a: &Algebra, chart: &Chart, mut y: Vec<C64>) -> Vec<C64> {
    let n = a.dim();
    let frame_n = Mat::from_fn(n, n - 1, |i, j| chart.frame[(i, j + 1)]);
    for _ in 0..ENDGAME_ITERS {
        let x = chart.lift(r(1.0), &y);
        let f = a.product_slice(&x, &x);
        let jac = a.left_mult_slice(&x).scale(r(2.0)).mul_mat(&frame_n);
        let neg: Vec<C64> = f.iter().map(|v| -v).collect();
        let dy = Svd::new(&jac).solve(&neg, 1e-10);
        let step = linalg::norm(&dy);
        for (yi, d) in y.iter_mut().zip(&dy) {
            *yi += d;
        }
        if !(step > 1e-15 * (1.0 + linalg::norm(&y))) {
            break;
        }
    }
    y
}

fn nilpotent_components(
    a: &Algebra,
    chart: &Chart,
    mut found: Vec<Vec<C64>>,
    scale: f64,
    rng: &mut SeededRng,
) -> NilpotentSearch {
    let n = a.dim();
    found.sort_by(|x, y| lex_cmp_vec(x, y));
    let units: Vec<Element> = found.iter().map(|y| normalize_direction(&chart.lift(r(1.0), y))).collect();
    // Two nilpotents x, y span a nilpotent plane exactly when xy = 0.
    let groups = clusters(units.len(), |i, j| {
        linalg::norm(&a.product_slice(units[i].coords(), units[j].coords())) <= 1e-8 * scale
    });
    let frame_n = Mat::from_fn(n, n - 1, |i, j| chart.frame[(i, j + 1)]);
    let mut has_family = false;
    let mut directions = Vec::with_capacity(groups.len());
    for group in &groups {
        let first = &units[group[0]];
        if group.iter().any(|&k| direction_distance(first, &units[k]) > FAMILY_SEPARATION) {
            has_family = true;
        } else if !has_family {
            let y = &found[group[0]];
            let x = chart.lift(r(1.0), y);
            let jac = a.left_mult_slice(&x).scale(r(2.0)).mul_mat(&frame_n);
            let sv = Svd::new(&jac);
            if sv.min_sigma() < SINGULAR_TOL * (1.0 + sv.max_sigma()) {
                has_family = probe_family(
                    y,
                    rng,
                    |kicked| {
                        let z = gauss_newton_nilpotent(a, chart, kicked);
                        let u = normalize_direction(&chart.lift(r(1.0), &z));
                        (linalg::norm(&a.product_slice(u.coords(), u.coords())) <= 1e-9 * scale).then_some(z)
                    },
                    linalg::dist,
                );
            }
        }
        directions.push(units[group[0]].clone());
    }
    NilpotentSearch { directions, has_family, degenerate: false }
}

/// Closed-form enumeration for two-dimensional algebras.
///
/// A nonzero direction `w` carries an idempotent or a nilpotent exactly when
/// `w^2` is parallel to `w`, i.e. when `det[w, w^2] = 0`. With `w = (u, v)`
/// this is a binary cubic whose roots are found by Cardano's formula; for
/// `w^2 = k w` the idempotent is `w / k`, and `k = 0` gives a nilpotent. A
/// repeated root is a singular idempotent (one with 1/2 in its spectrum),
/// and a vanishing cubic means every direction qualifies.
pub fn solve_2d_closed_form(a: &Algebra, cfg: &SolveConfig) -> Result<IdempotentSet> {
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: a.dim() });
    }
    let s = |i, j, k| a.structure(i, j, k);
    let (p, d) = (s(0, 0, 0), s(0, 0, 1));
    let (b, e) = (s(0, 1, 0), s(0, 1, 1));
    let (q, f) = (s(1, 1, 0), s(1, 1, 1));
    // det[w, w^2] for w = (t, 1), ascending in t.
    let cubic = [-q, f - b * 2.0, e * 2.0 - p, d];
    let size = cubic.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tensor_size = a.tensor().iter().map(|v| v.norm()).fold(0.0, f64::max);

    let mut idempotents = vec![(Element::zeros(2), 1usize)];
    let mut nilpotents = Vec::new();
    let mut has_infinite_family = false;
    let mut has_nilpotent_family = false;

    let classify = |w: Vec<C64>, mult: usize, idem: &mut Vec<(Element, usize)>, nil: &mut Vec<Element>| {
        let w = normalize_direction(&w);
        let sq = a.product_slice(w.coords(), w.coords());
        let k = linalg::dot_h(w.coords(), &sq);
        if k.norm() <= 1e-10 * (1.0 + tensor_size) {
            nil.push(w);
        } else {
            idem.push((w.scale(k.inv()), mult));
        }
    };

    if size <= 1e-13 * (1.0 + tensor_size) {
        // w^2 = l(w) w for a linear form l.
        has_infinite_family = true;
        let (l1, l2) = (p, f);
        if l1.norm() <= 1e-13 * (1.0 + tensor_size) && l2.norm() <= 1e-13 * (1.0 + tensor_size) {
            has_nilpotent_family = true;
            nilpotents.push(Element::basis(2, 0));
        } else {
            for w in [vec![r(1.0), C64::zero()], vec![C64::zero(), r(1.0)], vec![r(1.0), r(1.0)]] {
                let lw = l1 * w[0] + l2 * w[1];
                if lw.norm() > 1e-10 {
                    idempotents.push((Element::new(w.iter().map(|v| v / lw).collect()), 1));
                }
            }
            nilpotents.push(normalize_direction(&[l2, -l1]));
        }
    } else {
        let degree = (0..4).rev().find(|&i| cubic[i].norm() > 1e-12 * size).unwrap_or(0);
        if degree < 3 {
            classify(vec![r(1.0), C64::zero()], 3 - degree, &mut idempotents, &mut nilpotents);
        }
        for (t, mult) in low_degree_roots(&cubic[..=degree]) {
            classify(vec![t, r(1.0)], mult, &mut idempotents, &mut nilpotents);
        }
    }

    let mut records: Vec<IdempotentRecord> = idempotents
        .into_iter()
        .map(|(x, mult)| {
            let mut rec = IdempotentRecord::new(a, x, cfg);
            rec.multiplicity_estimate = mult;
            rec.on_family = has_infinite_family && !rec.is_zero();
            rec
        })
        .collect();
    sort_records(&mut records);
    Ok(IdempotentSet {
        algebra: a.clone(),
        config: cfg.clone(),
        idempotents: records,
        nilpotent_directions: nilpotents,
        has_nilpotent_family,
        paths_total: 4,
        paths_failed: 0,
        paths_at_infinity: 0,
        exhaustive: true,
        has_infinite_family,
        endpoints: Vec::new(),
    })
}

/// Roots with multiplicities of a polynomial of degree at most three
/// (ascending coefficients, nonzero leading term), by the classical
/// formulas followed by Newton polishing.
pub fn low_degree_roots(coeffs: &[C64]) -> Vec<(C64, usize)> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let mono: Vec<C64> = coeffs.iter().map(|v| v / lead).collect();
    let raw: Vec<C64> = match deg {
        0 => vec![],
        1 => vec![-mono[0]],
        2 => {
            let (b, c0) = (mono[1], mono[0]);
            let disc = (b * b - c0 * 4.0).sqrt();
            // Avoid cancellation: pick the larger-modulus root first.
            let q = if (-b + disc).norm() >= (-b - disc).norm() { (-b + disc) * 0.5 } else { (-b - disc) * 0.5 };
            if q.norm() == 0.0 { vec![C64::zero(), C64::zero()] } else { vec![q, c0 / q] }
        }
        _ => cardano(mono[2], mono[1], mono[0]).to_vec(),
    };
    let dp = poly::derivative(&mono);
    let polished: Vec<C64> = raw
        .iter()
        .map(|&z| {
            let mut z = z;
            for _ in 0..3 {
                let d = poly::eval(&dp, z);
                if d.norm() == 0.0 {
                    break;
                }
                let step = poly::eval(&mono, z) / d;
                if !(step.norm() < 1e-3 * (1.0 + z.norm())) {
                    break;
                }
                z -= step;
            }
            z
        })
        .collect();
    poly::cluster_roots(&mono, &polished, 1e-6)
}

/// Roots of `t^3 + a t^2 + b t + c`.
fn cardano(a: C64, b: C64, c: C64) -> [C64; 3] {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = a * a * a * (2.0 / 27.0) - a * b / 3.0 + c;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let u3 = if (-q / 2.0 + disc).norm() >= (-q / 2.0 - disc).norm() { -q / 2.0 + disc } else { -q / 2.0 - disc };
    let omega = C64::new(-0.5, Float::sqrt(3.0) / 2.0);
    let u = u3.cbrt();
    let mut out = [C64::zero(); 3];
    let mut rot = r(1.0);
    for slot in &mut out {
        let uk = u * rot;
        let y = if uk.norm() == 0.0 { C64::zero() } else { uk - p / (uk * 3.0) };
        *slot = y - shift;
        rot *= omega;
    }
    out
}

impl IdempotentSet {
    /// Human-readable path accounting.
    pub fn path_summary(&self) -> alloc::string::String {
        format!(
            "{} paths: {} converged, {} at infinity, {} failed",
            self.paths_total,
            self.paths_total - self.paths_failed - self.paths_at_infinity,
            self.paths_at_infinity,
            self.paths_failed
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::c;

    fn cfg() -> SolveConfig {
        SolveConfig::with_seed(3)
    }

    #[test]
    fn config_validation() {
        assert!(SolveConfig::default().validate().is_ok());
        let bad = SolveConfig { ds_min: 0.5, ..SolveConfig::default() };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let bad = SolveConfig { dedup_tol: 0.0, ..SolveConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn rejects_large_dimension() {
        let a = catalog::cubic_u1(13).unwrap();
        assert!(matches!(solve_idempotents(&a, &cfg()), Err(Error::DimensionTooLarge { dim: 13, max: 12 })));
    }

    #[test]
    fn u1_two_is_the_square() {
        let a = catalog::cubic_u1(2).unwrap();
        let set = solve_idempotents(&a, &cfg()).unwrap();
        assert_eq!(set.count(), 4);
        assert!(set.exhaustive && set.nilpotent_directions.is_empty());
        for e in [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]] {
            let e = Element::from_real(&e);
            assert_eq!(set.idempotents.iter().filter(|r| r.point.dist(&e) < 1e-12).count(), 1);
        }
    }

    #[test]
    fn matsuo_has_eight() {
        let set = solve_idempotents(&catalog::matsuo_3c(r(0.3)), &cfg()).unwrap();
        assert_eq!(set.count(), 8);
        assert!(set.nilpotent_directions.is_empty());
        assert!(!set.has_infinite_family);
        assert_eq!(set.paths_failed, 0);
    }

    #[test]
    fn newton_fixed_point_and_basins() {
        let a = catalog::cubic_u1(2).unwrap();
        let end = newton_refine(&a, &Element::from_real(&[1.0, 0.0]), &cfg());
        assert_eq!(end.status, PathStatus::Converged);
        assert_eq!(end.residual, 0.0);
        assert_eq!(end.point, Element::from_real(&[1.0, 0.0]));

        let end = newton_refine(&a, &Element::from_real(&[0.49, 0.51]), &cfg());
        assert_eq!(end.status, PathStatus::Converged);
        let p = end.point.coords();
        assert!((p[0] - r(0.0)).norm() < 1e-12 && (p[1] - r(1.0)).norm() < 1e-12);
    }

    #[test]
    fn newton_recovers_perturbed_matsuo_idempotent() {
        let a = catalog::matsuo_3c(r(0.3));
        let e = a.find_unit().unwrap();
        let kicked = Element::new(e.coords().iter().enumerate().map(|(i, v)| v + 1e-3 * (i as f64 + 1.0)).collect());
        let tight = SolveConfig { max_newton: 5, ..cfg() };
        let end = newton_refine(&a, &kicked, &tight);
        assert_eq!(end.status, PathStatus::Converged);
        assert!(end.point.dist(&e) < 1e-11);
    }

    #[test]
    fn nilpotent_of_degenerate_pair() {
        let a = catalog::nil2d();
        let set = solve_idempotents(&a, &cfg()).unwrap();
        assert_eq!(set.nonzero().count(), 2);
        assert_eq!(set.nilpotent_directions.len(), 1);
        let expect = normalize_direction(&[r(1.0), r(-0.5)]);
        assert!(direction_distance(&set.nilpotent_directions[0], &expect) < 1e-8);
        assert!(detect_nilpotents(&catalog::cubic_u1(3).unwrap(), &cfg()).unwrap().is_empty());
    }

    #[test]
    fn product_count_of_direct_sum() {
        let a = catalog::cubic_u1(1).unwrap().direct_sum(&catalog::cubic_u1(2).unwrap());
        assert_eq!(solve_idempotents(&a, &cfg()).unwrap().count(), 8);
    }

    #[test]
    fn deterministic_by_seed() {
        let a = catalog::random_algebra(3, 41);
        let x = solve_idempotents(&a, &cfg()).unwrap();
        let y = solve_idempotents(&a, &cfg()).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn closed_form_examples() {
        let set = solve_2d_closed_form(&catalog::constant_spectrum_2d(), &cfg()).unwrap();
        assert_eq!(set.count(), 4);
        let h = Float::sqrt(3.0) / 2.0;
        for target in [[0.0, 0.0], [1.0, 0.0], [-0.5, h], [-0.5, -h]] {
            let t = Element::from_real(&target);
            assert!(set.idempotents.iter().any(|rec| rec.point.dist(&t) < 1e-12), "{target:?}");
        }
        let set = solve_2d_closed_form(&catalog::two_dim_from_pair(r(1.0), r(0.25)), &cfg()).unwrap();
        assert_eq!(set.count(), 3);
        assert_eq!(set.nilpotent_directions.len(), 1);
        let u1 = solve_2d_closed_form(&catalog::cubic_u1(2).unwrap(), &cfg()).unwrap();
        assert_eq!(u1.count(), 4);
    }

    #[test]
    fn cardano_roots() {
        let roots = [c(1.0, 2.0), r(-3.0), c(0.5, -0.25)];
        let p = poly::from_roots(&roots);
        let found = low_degree_roots(&p);
        assert_eq!(found.len(), 3);
        for z in roots {
            assert!(found.iter().any(|(w, m)| *m == 1 && (w - z).norm() < 1e-12));
        }
        let double = poly::from_roots(&[r(2.0), r(2.0), r(-1.0)]);
        let found = low_degree_roots(&double);
        assert!(found.iter().any(|(w, m)| *m == 2 && (w - r(2.0)).norm() < 1e-9));
    }
}
