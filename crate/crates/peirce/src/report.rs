//! The analysis pipeline and its serializable report.

use num_complex::Complex64 as C64;
use peirce_core::algebra::Algebra;
use peirce_core::catalog::{check_expected, Expected};
use peirce_core::metrised::{
    cubic_from_algebra, extremal_idempotent, fusion_check, metrised_check, CubicForm, ExtremalResult, InnerProduct,
};
use peirce_core::solve::{solve_idempotents, IdempotentSet, PathStatus, SolveConfig};
use peirce_core::spectral::{
    algebra_spectrum, classify_genericity, common_eigenvalue_check, constant_spectrum_check, total_spectrum,
    GenericityKind, IdempotentRecord, Spectrum,
};
use peirce_core::syzygy::{conjugate_pairs, default_t_samples, syzygy_report, SyzygyReport};
use peirce_core::Error;
use serde::{Deserialize, Serialize};

use crate::format::{cx, cx_vec, Cx};

/// Syzygy residuals above this on a generic verdict are reported as an
/// inconsistency.
pub const SYZYGY_TOL: f64 = 1e-6;
/// Fusion violation allowed on an extremal idempotent.
pub const FUSION_TOL: f64 = 1e-7;
pub const EXPECTATION_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigen {
    pub value: Cx,
    pub multiplicity: usize,
}

fn eigens(v: &[(C64, usize)]) -> Vec<Eigen> {
    v.iter().map(|&(z, m)| Eigen { value: cx(z), multiplicity: m }).collect()
}

fn spectrum_json(s: &Spectrum) -> Vec<Eigen> {
    eigens(&s.roots)
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordJson {
    pub point: Vec<Cx>,
    pub residual: f64,
    /// Ascending coefficients of the monic `det(t I - L_c)`.
    pub charpoly: Vec<Cx>,
    pub p_half: Cx,
    pub spectrum: Vec<Eigen>,
    pub peirce_dims: Vec<Eigen>,
    pub semisimple: bool,
    pub regular: bool,
    pub half_distance: f64,
    pub is_real: bool,
    pub jacobian_min_singular_value: f64,
    pub multiplicity_estimate: usize,
    pub on_family: bool,
}

impl RecordJson {
    pub fn new(rec: &IdempotentRecord) -> Self {
        RecordJson {
            point: cx_vec(rec.point.coords()),
            residual: rec.residual,
            charpoly: cx_vec(rec.charpoly.coeffs()),
            p_half: cx(rec.p_half()),
            spectrum: spectrum_json(&rec.spectrum),
            peirce_dims: eigens(&rec.peirce_dims),
            semisimple: rec.semisimple,
            regular: rec.regular,
            half_distance: rec.half_distance,
            is_real: rec.is_real,
            jacobian_min_singular_value: rec.jacobian_min_singular_value,
            multiplicity_estimate: rec.multiplicity_estimate,
            on_family: rec.on_family,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraInfo {
    pub label: Option<String>,
    pub dim: usize,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverInfo {
    pub seed: u64,
    pub track_tol: f64,
    pub dedup_tol: f64,
    pub cluster_tol: f64,
    pub refine_tol: f64,
    pub rank_tol: f64,
    pub divergence_norm: f64,
    pub paths_total: usize,
    pub paths_converged: usize,
    pub paths_at_infinity: usize,
    pub paths_failed: usize,
    pub exhaustive: bool,
    pub has_infinite_family: bool,
    pub has_nilpotent_family: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub kind: String,
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyzygyJson {
    pub principal_max_residual: f64,
    pub principal_coefficient_residual: f64,
    pub derivative_residuals: Vec<f64>,
    pub vector_residual: f64,
    pub idemm_max_residual: f64,
    pub idemm1_max_residual: f64,
    pub p1_max_residual: Option<f64>,
    pub half41_residual: Option<f64>,
    pub max_residual: f64,
    pub t_samples: Vec<Cx>,
    pub s_samples: Option<Vec<Cx>>,
}

impl SyzygyJson {
    pub fn new(r: &SyzygyReport) -> Self {
        SyzygyJson {
            principal_max_residual: r.principal_max_residual,
            principal_coefficient_residual: r.principal_coefficient_residual,
            derivative_residuals: r.derivative_residuals.clone(),
            vector_residual: r.vector_residual,
            idemm_max_residual: r.idemm_max_residual,
            idemm1_max_residual: r.idemm1_max_residual,
            p1_max_residual: r.unital.as_ref().map(|u| u.p1_max_residual),
            half41_residual: r.unital.as_ref().and_then(|u| u.half41_residual),
            max_residual: r.max_residual(),
            t_samples: cx_vec(&r.samples),
            s_samples: r.unital.as_ref().map(|u| cx_vec(&u.s_samples)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantSpectrumJson {
    pub constant: bool,
    pub spectrum: Option<Vec<Eigen>>,
    pub report: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitalJson {
    pub unit: Vec<Cx>,
    pub unit_residual: f64,
    /// Index pairs `(c, e - c)` into `idempotents`; `None` when some
    /// idempotent has no conjugate in the set.
    pub conjugate_pairs: Option<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionJson {
    pub index: usize,
    pub violation: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalJson {
    pub f_value: f64,
    pub point: Vec<Cx>,
    pub direction: Vec<f64>,
    pub spectrum: Vec<Eigen>,
    pub max_re_nontrivial: Option<f64>,
    pub half_bound_holds: bool,
    pub one_is_simple: bool,
    pub starts: usize,
    pub seed: u64,
    pub fusion_violation: Option<f64>,
    pub fusion_note: Option<String>,
}

impl ExtremalJson {
    pub fn new(ex: &ExtremalResult, seed: u64, fusion: Result<f64, Error>) -> Self {
        let (fusion_violation, fusion_note) = match fusion {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        ExtremalJson {
            f_value: ex.f_value,
            point: cx_vec(ex.record.point.coords()),
            direction: ex.direction.clone(),
            spectrum: spectrum_json(&ex.record.spectrum),
            max_re_nontrivial: finite(ex.max_re_nontrivial),
            half_bound_holds: ex.half_bound_holds,
            one_is_simple: ex.one_is_simple,
            starts: ex.starts,
            seed,
            fusion_violation,
            fusion_note,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetrisedJson {
    pub inner_product: String,
    pub is_metrised: bool,
    pub violation: f64,
    /// Reported for every idempotent with 1/2 in its spectrum (no verdict
    /// unless the idempotent is extremal).
    pub fusion: Vec<FusionJson>,
    pub extremal: Option<ExtremalJson>,
    pub extremal_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckJson {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool: String,
    pub version: String,
    pub algebra: AlgebraInfo,
    pub solver: SolverInfo,
    pub idempotents: Vec<RecordJson>,
    pub nilpotent_directions: Vec<Vec<Cx>>,
    pub genericity: VerdictJson,
    pub algebra_spectrum: Vec<Cx>,
    pub total_spectrum: Vec<Cx>,
    pub syzygy: Option<SyzygyJson>,
    pub constant_spectrum: Option<ConstantSpectrumJson>,
    pub common_eigenvalues: Option<Vec<Cx>>,
    pub unital: Option<UnitalJson>,
    pub metrised: Option<MetrisedJson>,
    /// Comparison with the catalog's published data, when available.
    pub expected: Option<Vec<CheckJson>>,
    /// Findings that contradict the theory; a nonempty list gives exit code 2.
    pub inconsistencies: Vec<String>,
}

/// What to run besides the core solve.
#[derive(Debug, Clone, Default)]
pub struct AnalyzeOptions {
    pub cfg: SolveConfig,
    pub source: String,
    /// Inner product for the metrised checks, with a name for the report.
    pub inner_product: Option<(InnerProduct, String)>,
    /// Known cubic form (catalog metrised entries); otherwise derived from
    /// the algebra when it is metrised for a Euclidean inner product.
    pub cubic: Option<CubicForm>,
    pub expected: Option<Expected>,
    pub extremal_starts: usize,
}

fn metrised_section(a: &Algebra, set: &IdempotentSet, opts: &AnalyzeOptions, b: &InnerProduct, name: &str) -> Result<(MetrisedJson, Vec<String>), Error> {
    let cfg = &opts.cfg;
    let (is_metrised, violation) = metrised_check(a, b)?;
    let fusion = set
        .idempotents
        .iter()
        .enumerate()
        .filter(|(_, rec)| !rec.regular)
        .map(|(index, rec)| match fusion_check(a, b, rec, cfg) {
            Ok(v) => FusionJson { index, violation: Some(v), note: None },
            Err(e) => FusionJson { index, violation: None, note: Some(e.to_string()) },
        })
        .collect();
    let mut issues = Vec::new();
    let mut extremal = None;
    let mut extremal_note = None;
    if is_metrised && b.is_euclidean() {
        let cubic = match &opts.cubic {
            Some(u) => Ok(u.clone()),
            None => cubic_from_algebra(a, b),
        };
        match cubic.and_then(|u| extremal_idempotent(&u, opts.extremal_starts, cfg.seed)) {
            Ok(ex) => {
                let fus = fusion_check(a, b, &ex.record, cfg);
                if !ex.half_bound_holds {
                    issues.push(format!("extremal idempotent has Re(lambda) = {:.6e} > 1/2", ex.max_re_nontrivial));
                }
                if let Ok(v) = fus {
                    if v > FUSION_TOL {
                        issues.push(format!("fusion rule violated at the extremal idempotent by {v:.3e}"));
                    }
                }
                extremal = Some(ExtremalJson::new(&ex, cfg.seed, fus));
            }
            Err(e) => extremal_note = Some(e.to_string()),
        }
    } else if !is_metrised {
        extremal_note = Some(String::from("not metrised for this inner product"));
    } else {
        extremal_note = Some(String::from("extremal search needs the Euclidean inner product"));
    }
    Ok((MetrisedJson { inner_product: name.to_owned(), is_metrised, violation, fusion, extremal, extremal_note }, issues))
}

pub fn analyze(a: &Algebra, opts: &AnalyzeOptions) -> Result<AnalysisReport, Error> {
    let cfg = &opts.cfg;
    let set = solve_idempotents(a, cfg)?;
    let verdict = classify_genericity(&set);
    let mut inconsistencies = Vec::new();
    if verdict.inconsistent {
        inconsistencies.push(verdict.evidence.clone());
    }
    let generic = verdict.kind == GenericityKind::Generic;

    let syzygy = if generic {
        let rep = syzygy_report(&set, &default_t_samples())?;
        if rep.max_residual() > SYZYGY_TOL {
            inconsistencies.push(format!("generic verdict but a syzygy residual is {:.3e}", rep.max_residual()));
        }
        Some(SyzygyJson::new(&rep))
    } else {
        None
    };
    let (constant_spectrum, common_eigenvalues) = if generic {
        let constant = match constant_spectrum_check(&set) {
            Ok(c) => ConstantSpectrumJson { constant: c.constant, spectrum: c.spectrum.as_ref().map(spectrum_json), report: c.report },
            Err(e) => {
                inconsistencies.push(e.to_string());
                ConstantSpectrumJson { constant: true, spectrum: None, report: e.to_string() }
            }
        };
        let common = match common_eigenvalue_check(&set) {
            Ok(v) => cx_vec(&v),
            Err(e) => {
                inconsistencies.push(e.to_string());
                Vec::new()
            }
        };
        (Some(constant), Some(common))
    } else {
        (None, None)
    };

    let unital = match a.find_unit() {
        Some(e) => Some(UnitalJson {
            unit_residual: a.unit_residual(&e)?,
            unit: cx_vec(e.coords()),
            conjugate_pairs: conjugate_pairs(&set, &e).ok(),
        }),
        None => None,
    };

    let metrised = match &opts.inner_product {
        Some((b, name)) => {
            let (m, issues) = metrised_section(a, &set, opts, b, name)?;
            inconsistencies.extend(issues);
            Some(m)
        }
        None => None,
    };

    let expected = opts.expected.as_ref().map(|exp| {
        check_expected(&set, exp, EXPECTATION_TOL)
            .into_iter()
            .map(|c| CheckJson { name: c.name.to_owned(), passed: c.passed, detail: c.detail })
            .collect()
    });

    Ok(AnalysisReport {
        tool: String::from("peirce"),
        version: String::from(env!("CARGO_PKG_VERSION")),
        algebra: AlgebraInfo { label: a.label().map(str::to_owned), dim: a.dim(), source: opts.source.clone() },
        solver: SolverInfo {
            seed: cfg.seed,
            track_tol: cfg.track_tol,
            dedup_tol: cfg.dedup_tol,
            cluster_tol: cfg.cluster_tol,
            refine_tol: cfg.refine_tol,
            rank_tol: cfg.rank_tol,
            divergence_norm: cfg.divergence_norm,
            paths_total: set.paths_total,
            paths_converged: set.endpoints.iter().filter(|e| e.status == PathStatus::Converged).count(),
            paths_at_infinity: set.paths_at_infinity,
            paths_failed: set.paths_failed,
            exhaustive: set.exhaustive,
            has_infinite_family: set.has_infinite_family,
            has_nilpotent_family: set.has_nilpotent_family,
        },
        idempotents: set.idempotents.iter().map(RecordJson::new).collect(),
        nilpotent_directions: set.nilpotent_directions.iter().map(|d| cx_vec(d.coords())).collect(),
        genericity: VerdictJson { kind: verdict.kind.as_str().to_owned(), evidence: verdict.evidence },
        algebra_spectrum: cx_vec(&algebra_spectrum(&set)),
        total_spectrum: cx_vec(&total_spectrum(&set)),
        syzygy,
        constant_spectrum,
        common_eigenvalues,
        unital,
        metrised,
        expected,
        inconsistencies,
    })
}

fn fmt_c(z: Cx) -> String {
    // Round-off dust prints as -0.0000000000 otherwise.
    let clean = |x: f64| if x.abs() < 5e-11 { 0.0 } else { x };
    let z = [clean(z[0]), clean(z[1])];
    if z[1].abs() < 1e-12 * (1.0 + z[0].abs()) {
        format!("{:.10}", z[0])
    } else {
        format!("{:.10}{:+.10}i", z[0], z[1])
    }
}

fn fmt_spectrum(s: &[Eigen]) -> String {
    let parts: Vec<String> = s
        .iter()
        .map(|e| if e.multiplicity == 1 { fmt_c(e.value) } else { format!("{}^{}", fmt_c(e.value), e.multiplicity) })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn fmt_point(p: &[Cx]) -> String {
    let parts: Vec<String> = p.iter().map(|&z| fmt_c(z)).collect();
    format!("({})", parts.join(", "))
}

/// Plain-text summary of a report.
pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("algebra: {} (dim {}, from {})", r.algebra.label.as_deref().unwrap_or("unlabelled"), r.algebra.dim, r.algebra.source));
    let s = &r.solver;
    line(format!(
        "solver: seed {}, {} paths ({} converged, {} at infinity, {} failed), exhaustive: {}",
        s.seed, s.paths_total, s.paths_converged, s.paths_at_infinity, s.paths_failed, s.exhaustive
    ));
    line(format!("verdict: {} ({})", r.genericity.kind, r.genericity.evidence));
    line(format!("idempotents: {}", r.idempotents.len()));
    for (i, rec) in r.idempotents.iter().enumerate() {
        let mut flags = Vec::new();
        if !rec.semisimple {
            flags.push("not semisimple");
        }
        if rec.on_family {
            flags.push("on family");
        }
        if rec.is_real {
            flags.push("real");
        }
        line(format!(
            "  #{i} {} sigma = {} {}",
            fmt_point(&rec.point),
            fmt_spectrum(&rec.spectrum),
            if flags.is_empty() { String::new() } else { format!("[{}]", flags.join(", ")) }
        ));
    }
    if !r.nilpotent_directions.is_empty() {
        line(format!("nilpotent directions: {}", r.nilpotent_directions.len()));
        for d in &r.nilpotent_directions {
            line(format!("  {}", fmt_point(d)));
        }
    }
    let spec: Vec<String> = r.algebra_spectrum.iter().map(|&z| fmt_c(z)).collect();
    line(format!("algebra spectrum: {{{}}}", spec.join(", ")));
    if let Some(z) = &r.syzygy {
        let ders: Vec<String> = z.derivative_residuals.iter().map(|d| format!("{d:.2e}")).collect();
        line(format!(
            "syzygies: principal {:.2e}, derivatives [{}], vector {:.2e}, idemm {:.2e}, idemm1 {:.2e}",
            z.principal_max_residual,
            ders.join(", "),
            z.vector_residual,
            z.idemm_max_residual,
            z.idemm1_max_residual
        ));
        if let Some(p1) = z.p1_max_residual {
            line(format!("unital syzygies: P1 {p1:.2e}{}", z.half41_residual.map(|h| format!(", half41 {h:.2e}")).unwrap_or_default()));
        }
    }
    if let Some(c) = &r.constant_spectrum {
        line(format!("constant spectrum: {}", c.report));
    }
    if let Some(u) = &r.unital {
        line(format!("unit: {} (residual {:.2e})", fmt_point(&u.unit), u.unit_residual));
    }
    if let Some(m) = &r.metrised {
        line(format!("metrised ({}): {} (violation {:.2e})", m.inner_product, m.is_metrised, m.violation));
        if let Some(ex) = &m.extremal {
            line(format!(
                "  extremal: f = {:.12}, c = {}, sigma = {}, half bound {}",
                ex.f_value,
                fmt_point(&ex.point),
                fmt_spectrum(&ex.spectrum),
                if ex.half_bound_holds { "holds" } else { "fails" }
            ));
            match (ex.fusion_violation, &ex.fusion_note) {
                (Some(v), _) => line(format!("  fusion violation: {v:.2e}")),
                (None, Some(n)) => line(format!("  fusion: {n}")),
                _ => {}
            }
        }
        if let Some(n) = &m.extremal_note {
            line(format!("  extremal: {n}"));
        }
    }
    if let Some(checks) = &r.expected {
        for c in checks {
            line(format!("expected {}: {} ({})", c.name, if c.passed { "ok" } else { "MISMATCH" }, c.detail));
        }
    }
    for i in &r.inconsistencies {
        line(format!("INCONSISTENCY: {i}"));
    }
    out
}
