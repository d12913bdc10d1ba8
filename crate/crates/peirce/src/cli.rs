//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use peirce_core::algebra::Algebra;
use peirce_core::catalog::{self, CatalogEntry, Params, CATALOG};
use peirce_core::metrised::{
    algebra_from_cubic, cubic_from_algebra, extremal_idempotent, fusion_check, CubicForm, InnerProduct, DEFAULT_STARTS,
};
use peirce_core::solve::SolveConfig;

use crate::format::{emit_algebra, parse_algebra, parse_complex, parse_cubic, parse_inner_product, to_json, FormatError};
use crate::report::{analyze, render_text, AnalyzeOptions, ExtremalJson, FUSION_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INCONSISTENT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "peirce", version, about = "Idempotents, Peirce spectra and syzygies of commutative algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate idempotents and nilpotents, classify, and check the syzygies.
    Analyze(AnalyzeArgs),
    /// List or build the example algebras.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
    /// Extremal idempotent of a real cubic form.
    Extremal(ExtremalArgs),
}

#[derive(Debug, Subcommand)]
pub enum CatalogCommand {
    List,
    /// Print the algebra JSON of a catalog entry.
    Build {
        name: String,
        #[command(flatten)]
        params: CatalogParams,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CatalogParams {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub eps: Option<C64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub l1: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub l2: Option<C64>,
}

impl CatalogParams {
    fn to_params(&self, seed: Option<u64>) -> Params {
        Params { alpha: self.alpha, eps: self.eps, k: self.k, n: self.n, l1: self.l1, l2: self.l2, seed }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Algebra JSON file (omit when using --catalog).
    #[arg(required_unless_present = "catalog", conflicts_with = "catalog")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub catalog: Option<String>,
    #[command(flatten)]
    pub params: CatalogParams,
    /// Seeds the homotopy and the random catalog entries.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub track_tol: Option<f64>,
    #[arg(long)]
    pub dedup_tol: Option<f64>,
    #[arg(long)]
    pub cluster_tol: Option<f64>,
    /// Run the metrised checks with the Euclidean inner product.
    #[arg(long)]
    pub metrised: bool,
    /// Inner-product JSON file for the metrised checks.
    #[arg(long)]
    pub inner_product: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_STARTS)]
    pub starts: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtremalArgs {
    /// Cubic-form JSON file (omit when using --catalog).
    #[arg(required_unless_present = "catalog", conflicts_with = "catalog")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub catalog: Option<String>,
    #[command(flatten)]
    pub params: CatalogParams,
    #[arg(long, default_value_t = DEFAULT_STARTS)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// An input problem: reported on stderr, exit code 1.
#[derive(Debug)]
pub enum CliError {
    Io(PathBuf, std::io::Error),
    Format(FormatError),
    Math(peirce_core::Error),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Format(e) => write!(f, "{e}"),
            CliError::Math(e) => write!(f, "{e}"),
            CliError::Usage(s) => f.write_str(s),
        }
    }
}

impl std::error::Error for CliError {}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Format(e)
    }
}

impl From<peirce_core::Error> for CliError {
    fn from(e: peirce_core::Error) -> Self {
        CliError::Math(e)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_owned(), e))
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(p.clone(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn catalog_source(entry: &CatalogEntry) -> String {
    let mut s = format!("catalog:{}", entry.name);
    if !entry.params.is_empty() {
        let parts: Vec<String> = entry
            .params
            .iter()
            .map(|(k, v)| if v.im == 0.0 { format!("{k}={}", v.re) } else { format!("{k}={}{:+}i", v.re, v.im) })
            .collect();
        let _ = write!(s, "({})", parts.join(","));
    }
    s
}

fn solve_config(args: &AnalyzeArgs) -> Result<SolveConfig, CliError> {
    let mut cfg = SolveConfig::with_seed(args.seed);
    if let Some(t) = args.track_tol {
        cfg.track_tol = t;
    }
    if let Some(t) = args.dedup_tol {
        cfg.dedup_tol = t;
    }
    if let Some(t) = args.cluster_tol {
        cfg.cluster_tol = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<i32, CliError> {
    let cfg = solve_config(args)?;
    let mut opts = AnalyzeOptions { cfg, extremal_starts: args.starts, ..AnalyzeOptions::default() };
    let algebra: Algebra = match (&args.input, &args.catalog) {
        (Some(path), _) => {
            opts.source = path.display().to_string();
            parse_algebra(&read(path)?)?
        }
        (None, Some(name)) => {
            let entry = catalog::build(name, &args.params.to_params(Some(args.seed)))?;
            opts.source = catalog_source(&entry);
            opts.cubic = entry.cubic;
            opts.expected = entry.expected;
            entry.algebra
        }
        (None, None) => return Err(CliError::Usage("an input file or --catalog is required".into())),
    };
    match &args.inner_product {
        Some(path) => {
            let b = parse_inner_product(&read(path)?)?;
            if b.dim() != algebra.dim() {
                return Err(CliError::Math(peirce_core::Error::DimensionMismatch { expected: algebra.dim(), found: b.dim() }));
            }
            opts.inner_product = Some((b, path.display().to_string()));
        }
        None if args.metrised => opts.inner_product = Some((InnerProduct::euclidean(algebra.dim()), "euclidean".into())),
        None => {}
    }
    let report = analyze(&algebra, &opts)?;
    let text = match args.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Text => render_text(&report),
    };
    write_output(&args.out, &text)?;
    for i in &report.inconsistencies {
        eprintln!("inconsistency: {i}");
    }
    Ok(if report.inconsistencies.is_empty() { EXIT_OK } else { EXIT_INCONSISTENT })
}

fn cmd_catalog(cmd: &CatalogCommand) -> Result<i32, CliError> {
    match cmd {
        CatalogCommand::List => {
            let mut out = String::new();
            for info in CATALOG {
                let params = if info.params.is_empty() { String::from("-") } else { info.params.join(",") };
                let _ = writeln!(out, "{:<14} {:<12} {}", info.name, params, info.description);
            }
            print!("{out}");
        }
        CatalogCommand::Build { name, params, seed } => {
            let entry = catalog::build(name, &params.to_params(*seed))?;
            print!("{}", emit_algebra(&entry.algebra));
        }
    }
    Ok(EXIT_OK)
}

fn cmd_extremal(args: &ExtremalArgs) -> Result<i32, CliError> {
    let u: CubicForm = match (&args.input, &args.catalog) {
        (Some(path), _) => parse_cubic(&read(path)?)?,
        (None, Some(name)) => {
            let entry = catalog::build(name, &args.params.to_params(Some(args.seed)))?;
            match entry.cubic {
                Some(u) => u,
                None => cubic_from_algebra(&entry.algebra, &InnerProduct::euclidean(entry.algebra.dim()))?,
            }
        }
        (None, None) => return Err(CliError::Usage("an input file or --catalog is required".into())),
    };
    let ex = extremal_idempotent(&u, args.starts, args.seed)?;
    let b = InnerProduct::euclidean(u.dim());
    let a = algebra_from_cubic(&u, &b)?;
    let fusion = fusion_check(&a, &b, &ex.record, &SolveConfig::with_seed(args.seed));
    let fusion_bad = matches!(fusion, Ok(v) if v > FUSION_TOL);
    let report = ExtremalJson::new(&ex, args.seed, fusion);
    let text = match args.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Text => {
            let re = |x: f64| format!("{:.12}", if x.abs() < 5e-13 { 0.0 } else { x });
            let mut s = String::new();
            let _ = writeln!(s, "f = {:.15}", report.f_value);
            let pts: Vec<String> = report.point.iter().map(|z| re(z[0])).collect();
            let _ = writeln!(s, "c = ({})", pts.join(", "));
            let sp: Vec<String> = report
                .spectrum
                .iter()
                .map(|e| if e.multiplicity == 1 { re(e.value[0]) } else { format!("{}^{}", re(e.value[0]), e.multiplicity) })
                .collect();
            let _ = writeln!(s, "sigma = {{{}}}", sp.join(", "));
            let _ = writeln!(s, "half bound: {}", if report.half_bound_holds { "holds" } else { "fails" });
            match (report.fusion_violation, &report.fusion_note) {
                (Some(v), _) => {
                    let _ = writeln!(s, "fusion violation: {v:.3e}");
                }
                (None, Some(n)) => {
                    let _ = writeln!(s, "fusion: {n}");
                }
                _ => {}
            }
            s
        }
    };
    write_output(&args.out, &text)?;
    Ok(if report.half_bound_holds && !fusion_bad { EXIT_OK } else { EXIT_INCONSISTENT })
}

pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Catalog { command } => cmd_catalog(command),
        Command::Extremal(args) => cmd_extremal(args),
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}
