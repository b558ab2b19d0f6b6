//! Command-line front end for certification campaigns.
//!
//! [`run`] parses an argument vector, evaluates the requested certificates and
//! writes a JSON or CSV report. Exit codes: `0` when no record is violated,
//! `2` when some record is, `1` on usage or configuration errors.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

use schatten::entropy::{
    classical_renyi_bound_certificate, renyi_pinsker_certificate, ricard_bound_certificate,
};
use schatten::experiments::{
    constant_iteration, dyadic_p_grid, ensemble_suite, epsilon_sweep_slope_in, example_ratio_in,
    pinsker_constant_extraction, ExampleFamily, Inequality, SuiteParams, SuiteReport,
};
use schatten::fit::log_spaced;
use schatten::matcore::{random_sample, EnsembleConfig, EnsembleKind};
use schatten::DensityMatrix;
use schatten::schatten::{gradient_fd_check, schatten_norm};
use schatten::{default_tolerance, CertificateStatus, InequalityCertificate};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Parser)]
#[command(name = "schatten", version, about = "Certify Schatten-norm and quantum entropy inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Evaluate inequalities over a random ensemble.
    Certify,
    /// Sweep the two-state example over a grid of ε.
    Sweep,
    /// Evaluate the two-state example at the given ε and α.
    Example,
    /// Compare finite differences of ‖A + tB‖_p with the duality map.
    GradientCheck,
    /// Extract the limiting Pinsker constant from the overlap bound.
    PinskerConstant,
    /// Iterate K ↦ 1/4 + K/2.
    IterateConstant,
}

impl Command {
    fn as_str(self) -> &'static str {
        match self {
            Self::Certify => "certify",
            Self::Sweep => "sweep",
            Self::Example => "example",
            Self::GradientCheck => "gradient-check",
            Self::PinskerConstant => "pinsker-constant",
            Self::IterateConstant => "iterate-constant",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Ensemble {
    Ginibre,
    Wishart,
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Midpoint,
    Boundary,
}

#[derive(Debug, clap::Args)]
struct Opts {
    /// Matrix dimensions.
    #[arg(long, global = true, num_args = 1.., value_delimiter = ',', default_values_t = vec![2, 3, 4, 8])]
    dim: Vec<usize>,
    /// Trials per dimension.
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Schatten exponents in (1, 2].
    #[arg(long, global = true, num_args = 1.., value_delimiter = ',',
          default_values_t = vec![1.1, 1.25, 1.5, 1.75, 2.0])]
    p: Vec<f64>,
    /// Rényi orders in (0, 1).
    #[arg(long, global = true, num_args = 1.., value_delimiter = ',',
          default_values_t = vec![0.5, 0.6, 0.7, 0.8, 0.9, 0.99])]
    alpha: Vec<f64>,
    /// Example parameters in (0, 1/2); `sweep` defaults to 8 log-spaced
    /// points in [1e-5, 1e-2], `example` to 0.01.
    #[arg(long, global = true, num_args = 1.., value_delimiter = ',')]
    epsilon: Option<Vec<f64>>,
    /// Certificate tolerance; defaults to 1e-9, scaled by dim above dim 10.
    /// `gradient-check` defaults to 0 since `--rel-tol` is its tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Inequalities for `certify`; all when absent.
    #[arg(long, global = true, num_args = 1.., value_delimiter = ',')]
    inequality: Option<Vec<String>>,
    /// Ensemble for `certify`, `gradient-check` and `pinsker-constant`.
    #[arg(long, global = true, value_enum, default_value_t = Ensemble::Ginibre)]
    ensemble: Ensemble,
    /// Two-state family for `example` and `sweep`.
    #[arg(long, global = true, value_enum, default_value_t = Family::Midpoint)]
    family: Family,
    /// Finite-difference step for `gradient-check`.
    #[arg(long, global = true, default_value_t = 1e-5)]
    step: f64,
    /// Bound on `|fd - analytic| / (1 + |analytic|)` for `gradient-check`.
    #[arg(long, global = true, default_value_t = 1e-6)]
    rel_tol: f64,
    /// Dyadic levels `p = 1 + 2^-j` for `pinsker-constant`.
    #[arg(long, global = true, default_value_t = 12)]
    levels: u32,
    /// Starting constant for `iterate-constant`.
    #[arg(long, global = true, default_value_t = 0.25)]
    k0: f64,
    #[arg(long, global = true, default_value_t = 20)]
    steps: usize,
}

/// A float serialized with 17 significant digits; non-finite values become
/// the strings `"inf"`, `"-inf"` and `"nan"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Num {
    pub fn text(self) -> String {
        let v = self.0;
        if v.is_nan() {
            "nan".into()
        } else if v.is_infinite() {
            if v > 0.0 { "inf".into() } else { "-inf".into() }
        } else {
            format!("{v:.16e}")
        }
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(self.text()).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_str(&self.text())
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Record {
    pub name: String,
    pub parameters: BTreeMap<String, Num>,
    pub lhs: Num,
    pub rhs: Num,
    pub gap: Num,
    pub status: CertificateStatus,
}

impl Record {
    fn from_certificate(c: &InequalityCertificate, parameters: BTreeMap<String, f64>) -> Self {
        Self {
            name: c.name.clone(),
            parameters: parameters.into_iter().map(|(k, v)| (k, Num(v))).collect(),
            lhs: Num(c.lhs),
            rhs: Num(c.rhs),
            gap: Num(c.gap),
            status: c.status,
        }
    }

    fn parameters_json(&self) -> String {
        serde_json::to_string(&self.parameters).expect("numbers and strings always serialize")
    }

    fn sort_key(&self) -> (String, u64, u64) {
        let get = |k: &str| self.parameters.get(k).map_or(0, |n| n.0 as u64);
        (self.name.clone(), get("dim"), get("trial"))
    }
}

#[derive(Debug, serde::Serialize)]
struct ConfigEcho {
    command: &'static str,
    dim: Vec<usize>,
    trials: usize,
    seed: u64,
    p: Vec<Num>,
    alpha: Vec<Num>,
    epsilon: Vec<Num>,
    tol: Option<Num>,
    format: &'static str,
    out: Option<String>,
    inequality: Vec<String>,
    ensemble: &'static str,
    family: &'static str,
    step: Num,
    rel_tol: Num,
    levels: u32,
    k0: Num,
    steps: usize,
}

#[derive(Debug, serde::Serialize)]
struct Aggregate {
    min_gap: Num,
    violations: usize,
    wall_time: Num,
}

#[derive(Debug, serde::Serialize)]
struct Report {
    schema_version: &'static str,
    config: ConfigEcho,
    records: Vec<Record>,
    aggregate: Aggregate,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(schatten::Error),
    Io(String),
}

impl From<schatten::Error> for CliError {
    fn from(e: schatten::Error) -> Self {
        Self::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Core(e) => write!(f, "error: {e}"),
            Self::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

/// Run the tool on `argv` (including the program name) and return the exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(violations) => {
            if violations > 0 {
                2
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("{e}");
            1
        }
    }
}

fn epsilons(opts: &Opts, command: Command) -> Vec<f64> {
    match (&opts.epsilon, command) {
        (Some(e), _) => e.clone(),
        (None, Command::Sweep) => log_spaced(1e-5, 1e-2, 8),
        (None, _) => vec![0.01],
    }
}

fn validate(opts: &Opts, command: Command) -> Result<(), CliError> {
    let bad = |m: String| Err(CliError::Usage(m));
    if opts.dim.is_empty() || opts.dim.iter().any(|&d| d < 1) {
        return bad("--dim values must be >= 1".into());
    }
    if opts.trials < 1 {
        return bad("--trials must be >= 1".into());
    }
    if let Some(p) = opts.p.iter().find(|&&p| !(p > 1.0 && p <= 2.0)) {
        return bad(format!("--p {p} not in (1, 2]"));
    }
    if let Some(a) = opts.alpha.iter().find(|&&a| !(a > 0.0 && a < 1.0)) {
        return bad(format!("--alpha {a} not in (0, 1)"));
    }
    if let Some(e) = epsilons(opts, command).iter().find(|&&e| !(e > 0.0 && e < 0.5)) {
        return bad(format!("--epsilon {e} not in (0, 1/2)"));
    }
    if let Some(t) = opts.tol.filter(|t| !(*t > 0.0 && t.is_finite())) {
        return bad(format!("--tol {t} must be positive"));
    }
    if !(opts.step != 0.0 && opts.step.is_finite()) {
        return bad("--step must be finite and nonzero".into());
    }
    if !(opts.rel_tol > 0.0) {
        return bad("--rel-tol must be positive".into());
    }
    if opts.levels < 2 {
        return bad("--levels must be >= 2".into());
    }
    if !opts.k0.is_finite() {
        return bad("--k0 must be finite".into());
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<usize, CliError> {
    let opts = &cli.opts;
    validate(opts, cli.command)?;
    let start = Instant::now();
    let mut records = match cli.command {
        Command::Certify => certify(opts)?,
        Command::Sweep => sweep(opts)?,
        Command::Example => example(opts)?,
        Command::GradientCheck => gradient_check(opts)?,
        Command::PinskerConstant => pinsker_constant(opts)?,
        Command::IterateConstant => iterate_constant(opts),
    };
    records.sort_by_key(Record::sort_key);
    let wall_time = start.elapsed().as_secs_f64();

    let violations = records.iter().filter(|r| r.status == CertificateStatus::Violated).count();
    let min_gap = records.iter().map(|r| r.gap.0).fold(f64::INFINITY, |m, g| {
        if m.is_nan() || g.is_nan() {
            f64::NAN
        } else {
            m.min(g)
        }
    });
    let report = Report {
        schema_version: SCHEMA_VERSION,
        config: echo(opts, cli.command),
        records,
        aggregate: Aggregate {
            min_gap: Num(min_gap),
            violations,
            wall_time: Num(wall_time),
        },
    };
    let bytes = match opts.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => csv_bytes(&report.records)?,
    };
    match &opts.out {
        Some(path) => File::create(path)
            .and_then(|mut f| f.write_all(&bytes))
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => io::stdout().write_all(&bytes).map_err(|e| CliError::Io(e.to_string()))?,
    }
    eprintln!(
        "{} records, {} violated, min gap {}",
        report.records.len(),
        violations,
        Num(min_gap).text()
    );
    Ok(violations)
}

fn csv_bytes(records: &[Record]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["name", "parameters", "lhs", "rhs", "gap", "status"]).map_err(err)?;
    for r in records {
        w.write_record([
            r.name.clone(),
            r.parameters_json(),
            r.lhs.text(),
            r.rhs.text(),
            r.gap.text(),
            r.status.as_str().to_owned(),
        ])
        .map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn echo(opts: &Opts, command: Command) -> ConfigEcho {
    let nums = |v: &[f64]| v.iter().copied().map(Num).collect();
    ConfigEcho {
        command: command.as_str(),
        dim: opts.dim.clone(),
        trials: opts.trials,
        seed: opts.seed,
        p: nums(&opts.p),
        alpha: nums(&opts.alpha),
        epsilon: nums(&epsilons(opts, command)),
        tol: opts.tol.map(Num),
        format: match opts.format {
            Format::Json => "json",
            Format::Csv => "csv",
        },
        out: opts.out.as_ref().map(|p| p.display().to_string()),
        inequality: inequality_names(opts).iter().map(|s| s.to_string()).collect(),
        ensemble: match opts.ensemble {
            Ensemble::Ginibre => "ginibre",
            Ensemble::Wishart => "wishart",
            Ensemble::Diagonal => "diagonal",
        },
        family: match opts.family {
            Family::Midpoint => "midpoint",
            Family::Boundary => "boundary",
        },
        step: Num(opts.step),
        rel_tol: Num(opts.rel_tol),
        levels: opts.levels,
        k0: Num(opts.k0),
        steps: opts.steps,
    }
}

fn inequality_names(opts: &Opts) -> Vec<&str> {
    match &opts.inequality {
        Some(v) => v.iter().map(String::as_str).collect(),
        None => Inequality::ALL.iter().map(|i| i.name()).collect(),
    }
}

fn ensemble_config(opts: &Opts, dim: usize) -> Result<EnsembleConfig, CliError> {
    let kind = match opts.ensemble {
        Ensemble::Ginibre => EnsembleKind::GinibreGeneral,
        Ensemble::Wishart => EnsembleKind::WishartDensity,
        Ensemble::Diagonal => EnsembleKind::DiagonalCommuting,
    };
    Ok(EnsembleConfig::new(dim, kind, opts.trials, opts.seed)?)
}

fn retolerance(mut c: InequalityCertificate, tol: Option<f64>) -> InequalityCertificate {
    if let Some(t) = tol {
        c.tolerance = t;
        c.status = CertificateStatus::classify(c.gap, t);
    }
    c
}

fn certify(opts: &Opts) -> Result<Vec<Record>, CliError> {
    let names = inequality_names(opts);
    for n in &names {
        Inequality::parse(n).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let params = SuiteParams {
        p: opts.p.clone(),
        alpha: opts.alpha.clone(),
        tolerance: opts.tol,
    };
    let mut reports = Vec::new();
    for &dim in &opts.dim {
        reports.push(ensemble_suite(&ensemble_config(opts, dim)?, &names, &params)?);
    }
    Ok(SuiteReport::merge(reports)
        .records
        .iter()
        .map(|r| Record::from_certificate(&r.certificate, r.parameters.clone()))
        .collect())
}

fn family(opts: &Opts) -> ExampleFamily {
    match opts.family {
        Family::Midpoint => ExampleFamily::Midpoint,
        Family::Boundary => ExampleFamily::Boundary,
    }
}

/// Certificates on one example pair, each carrying the ratio
/// `‖ρ^α - σ^α‖_{1/α} / ‖ρ - σ‖_1` and its leading-order prediction.
fn example_records(opts: &Opts, eps: f64, alpha: f64, extra: &[(&str, f64)]) -> Result<Vec<Record>, CliError> {
    let fam = family(opts);
    let ratio = example_ratio_in(fam, eps, alpha)?;
    let (rho, sigma) = fam.states(eps)?;
    let mut params = BTreeMap::from([
        ("alpha".to_owned(), alpha),
        ("epsilon".to_owned(), eps),
        ("measured_ratio".to_owned(), ratio.measured),
        ("predicted_ratio".to_owned(), ratio.predicted_leading),
    ]);
    params.extend(extra.iter().map(|(k, v)| (k.to_string(), *v)));
    let mut certs = vec![
        ricard_bound_certificate(&rho, &sigma, alpha)?,
        classical_renyi_bound_certificate(&rho, &sigma, alpha)?,
    ];
    if alpha >= 0.5 {
        certs.push(renyi_pinsker_certificate(&rho, &sigma, alpha)?);
    }
    Ok(certs
        .into_iter()
        .map(|c| Record::from_certificate(&retolerance(c, opts.tol), params.clone()))
        .collect())
}

fn example(opts: &Opts) -> Result<Vec<Record>, CliError> {
    let mut out = Vec::new();
    for &eps in &epsilons(opts, Command::Example) {
        for &alpha in &opts.alpha {
            out.extend(example_records(opts, eps, alpha, &[])?);
        }
    }
    Ok(out)
}

fn sweep(opts: &Opts) -> Result<Vec<Record>, CliError> {
    let grid = epsilons(opts, Command::Sweep);
    let mut out = Vec::new();
    for &alpha in &opts.alpha {
        let fit = epsilon_sweep_slope_in(family(opts), alpha, &grid)?;
        for &eps in &grid {
            out.extend(example_records(opts, eps, alpha, &[("fitted_exponent", fit.exponent)])?);
        }
    }
    Ok(out)
}

fn gradient_check(opts: &Opts) -> Result<Vec<Record>, CliError> {
    let mut out = Vec::new();
    for &dim in &opts.dim {
        let cfg = ensemble_config(opts, dim)?;
        for trial in 0..opts.trials {
            let (a, b) = random_sample(&cfg, trial)?.general_pair();
            for &p in &opts.p {
                let g = gradient_fd_check(&a, &b, p, opts.step)?;
                let rel = g.deviation.abs() / (1.0 + g.analytic_slope.abs());
                let tol = opts.tol.unwrap_or(0.0);
                let c = InequalityCertificate::new("gradient_check", rel, opts.rel_tol, tol);
                let params = BTreeMap::from([
                    ("dim".to_owned(), dim as f64),
                    ("trial".to_owned(), trial as f64),
                    ("p".to_owned(), p),
                    ("t".to_owned(), opts.step),
                    ("fd_slope".to_owned(), g.fd_slope),
                    ("analytic_slope".to_owned(), g.analytic_slope),
                    ("b_norm".to_owned(), schatten_norm(&b, p)?),
                ]);
                out.push(Record::from_certificate(&c, params));
            }
        }
    }
    Ok(out)
}

const PINSKER_MARGIN: f64 = 0.499;

fn pinsker_constant(opts: &Opts) -> Result<Vec<Record>, CliError> {
    let grid = dyadic_p_grid(opts.levels);
    let mut out = Vec::new();
    let mut push = |rho: &DensityMatrix, sigma: &DensityMatrix, mut params: BTreeMap<String, f64>, tol: f64| -> Result<(), CliError> {
        let est = pinsker_constant_extraction(rho, sigma, &grid)?;
        params.insert("limit".into(), est.limit);
        let tol = opts.tol.unwrap_or(tol);
        let c = InequalityCertificate::new("pinsker_constant", PINSKER_MARGIN, est.extrapolated_k, tol);
        out.push(Record::from_certificate(&c, params.clone()));
        for (&p, &k) in grid.iter().zip(&est.k_estimates) {
            let mut pp = params.clone();
            pp.insert("p".into(), p);
            let c = InequalityCertificate::new("pinsker_constant_grid", 0.25, k, tol);
            out.push(Record::from_certificate(&c, pp));
        }
        Ok(())
    };
    match &opts.epsilon {
        Some(eps) => {
            for &e in eps {
                let (rho, sigma) = family(opts).states(e)?;
                push(&rho, &sigma, BTreeMap::from([("epsilon".to_owned(), e)]), default_tolerance(2))?;
            }
        }
        None => {
            for &dim in &opts.dim {
                let cfg = ensemble_config(opts, dim)?;
                for trial in 0..opts.trials {
                    let (rho, sigma) = random_sample(&cfg, trial)?.density_pair()?;
                    let params = BTreeMap::from([("dim".to_owned(), dim as f64), ("trial".to_owned(), trial as f64)]);
                    push(&rho, &sigma, params, default_tolerance(dim))?;
                }
            }
        }
    }
    Ok(out)
}

fn iterate_constant(opts: &Opts) -> Vec<Record> {
    let seq = constant_iteration(opts.k0, opts.steps);
    let d0 = (opts.k0 - 0.5).abs();
    let tol = opts.tol.unwrap_or(default_tolerance(1));
    seq.iter()
        .enumerate()
        .map(|(n, &k)| {
            // |K_n - 1/2| = 2^{-n} |K_0 - 1/2|
            let c = InequalityCertificate::new(
                "constant_iteration",
                (k - 0.5).abs(),
                d0 * 0.5f64.powi(n as i32),
                tol,
            );
            let params = BTreeMap::from([("step".to_owned(), n as f64), ("k".to_owned(), k)]);
            Record::from_certificate(&c, params)
        })
        .collect()
}
