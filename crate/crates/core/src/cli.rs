//! Command-line front end: JSON reports and CSV tables for every check.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{
    compactness_report, diamagnetic_check, fractional_apply, interpolation_norm,
    lp_interpolation_check, tail_mass_check, truncation_modulus, CompactnessReport,
};
use crate::error::{Error, Result};
use crate::extension::{
    dtn_limit, evaluate_extension, extension_coefficients, extension_energy, half_line_quadrature,
    mode_profile, spectral_energy, FracOrder, HalfLineQuadrature,
};
use crate::operators::{
    build_any, project, synthesize, AnySpectrum, BackendKind, BackendSpec, GroundFunction,
    MagneticGrid, Potential, Spectrum,
};
use crate::suite::{run_suite, Check};
use crate::Scalar;

#[derive(Debug, Parser)]
#[command(
    name = "fracspec",
    version,
    about = "Spectral fractional powers, their extension problem, and compactness diagnostics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues and basis diagnostics of a backend.
    Spectrum(RunConfig),
    /// Apply A^s to a function.
    FracApply(RunConfig),
    /// Evaluate the extension u(., t).
    ExtensionEval(RunConfig),
    /// Compare the cylinder energy with K(s) sum lambda^s c^2.
    EnergyCheck(RunConfig),
    /// Extrapolated boundary flux of one mode against K(s) lambda^s c0.
    DtnCheck(RunConfig),
    /// Truncation moduli of the embedding.
    Compactness(RunConfig),
    /// Oscillator tail-mass bound and L^q interpolation.
    TailCheck(RunConfig),
    /// Discrete diamagnetic inequality on the magnetic grid.
    DiamagneticCheck(RunConfig),
    /// Run the full acceptance suite.
    Report(RunConfig),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::FracApply(_) => "frac-apply",
            Command::ExtensionEval(_) => "extension-eval",
            Command::EnergyCheck(_) => "energy-check",
            Command::DtnCheck(_) => "dtn-check",
            Command::Compactness(_) => "compactness",
            Command::TailCheck(_) => "tail-check",
            Command::DiamagneticCheck(_) => "diamagnetic-check",
            Command::Report(_) => "report",
        }
    }

    pub fn config(&self) -> &RunConfig {
        match self {
            Command::Spectrum(c)
            | Command::FracApply(c)
            | Command::ExtensionEval(c)
            | Command::EnergyCheck(c)
            | Command::DtnCheck(c)
            | Command::Compactness(c)
            | Command::TailCheck(c)
            | Command::DiamagneticCheck(c)
            | Command::Report(c) => c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunConfig {
    /// Backend kind, e.g. interval-analytic or box2d-fd.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend: Option<String>,
    /// Domain length or half-width; interval-analytic defaults to pi.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    /// Interior grid points per axis (fd backends).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    /// Number of modes (analytic backends) or retained modes.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    /// Grushin exponent, >= 0.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Peierls phase per plaquette (magnetic-fd).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flux: Option<f64>,
    /// b_const_plus_x2, one_plus_x4 or custom_table.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    /// Node values of a custom_table potential, one per line.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential_table: Option<PathBuf>,
    /// MatrixMarket file for the matrix-file backend.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PathBuf>,
    /// Fractional order in (0, 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// Gauss points per quadrature panel.
    #[arg(long, default_value_t = 16)]
    pub quad_nodes: usize,
    /// Quadrature cutoff; defaults to 14 ln 10 / sqrt(lambda_1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmax: Option<f64>,
    /// Single truncation rank for compactness; all ranks when omitted.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// Exponent for the L^q interpolation check in tail-check.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Tail radius R for tail-check.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Extension variable for extension-eval.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Eigenvalue for dtn-check.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Boundary value for dtn-check.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub c0: f64,
    /// Nodal values of f, one per line (re,im for complex backends).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Seed for random test functions.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// Plot-ready rows with a header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub seed: u64,
    pub version: String,
    pub timestamp: String,
    #[serde(skip)]
    pub table: Table,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.table.header).map_err(csv_err)?;
        for row in &self.table.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("csv: {e}"))
}

/// Parses `argv`, runs the subcommand and writes the report. Returns the
/// process exit status: 0 on success, 1 for invalid input, 2 for numerical
/// failures or failed checks.
pub fn run<I, A>(argv: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli).and_then(|r| emit(&r, cli.command.config()).map(|_| r)) {
        Ok(report) if report.all_pass() => 0,
        Ok(report) => {
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("check failed: {} (value {:e}, bound {:e})", c.name, c.value, c.bound);
            }
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn emit(report: &Report, cfg: &RunConfig) -> Result<()> {
    let text = match cfg.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv()?,
    };
    match &cfg.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs a parsed command and returns its report.
pub fn execute(cli: &Cli) -> Result<Report> {
    let cfg = cli.command.config();
    let out = match &cli.command {
        Command::Spectrum(c) => with_spectrum(c, Spectrum_),
        Command::FracApply(c) => with_spectrum(c, FracApply),
        Command::ExtensionEval(c) => with_spectrum(c, ExtensionEval),
        Command::EnergyCheck(c) => with_spectrum(c, EnergyCheck),
        Command::Compactness(c) => with_spectrum(c, Compactness),
        Command::DtnCheck(c) => dtn_check(c),
        Command::TailCheck(c) => tail_check(c),
        Command::DiamagneticCheck(c) => diamagnetic(c),
        Command::Report(c) => suite_report(c),
    }?;
    Ok(Report {
        command: cli.command.name().into(),
        inputs: serde_json::to_value(cfg).expect("config serializes"),
        results: out.results,
        checks: out.checks,
        seed: cfg.seed,
        version: env!("CARGO_PKG_VERSION").into(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        table: out.table,
    })
}

struct Outcome {
    results: Value,
    checks: Vec<Check>,
    table: Table,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn order(cfg: &RunConfig) -> Result<FracOrder> {
    let s = cfg
        .s
        .ok_or_else(|| Error::InvalidArgument("--s is required".into()))?;
    FracOrder::new(s)
}

pub fn backend_spec(cfg: &RunConfig) -> Result<BackendSpec> {
    let name = cfg
        .backend
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--backend is required".into()))?;
    let kind =
        BackendKind::parse(name).ok_or_else(|| Error::InvalidBackend(format!("unknown backend {name}")))?;
    let potential = match cfg.potential.as_deref() {
        None => None,
        Some(p) if p.replace('-', "_") == "custom_table" => {
            let path = cfg.potential_table.as_ref().ok_or_else(|| {
                Error::InvalidArgument("custom_table needs --potential-table".into())
            })?;
            let rows = read_rows(path)?;
            Some(Potential::CustomTable(rows.iter().map(|r| r[0]).collect()))
        }
        Some(p) => Some(
            Potential::parse(p).ok_or_else(|| Error::InvalidBackend(format!("unknown potential {p}")))?,
        ),
    };
    // the unit-speed interval [0, π] has λ_k = k²
    let length = match (cfg.length, kind) {
        (None, BackendKind::IntervalAnalytic) => Some(std::f64::consts::PI),
        (l, _) => l,
    };
    Ok(BackendSpec {
        kind,
        length,
        grid: cfg.grid,
        modes: cfg.modes,
        gamma: cfg.gamma,
        potential,
        flux: cfg.flux,
        path: cfg.matrix.clone(),
    })
}

/// Numeric rows of a headerless CSV file.
fn read_rows(path: &PathBuf) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::InvalidArgument(format!("{}: {other:?}", path.display())),
        })?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidArgument(format!("{}:{}: {e}", path.display(), i + 1)))?;
        if row.is_empty() {
            continue;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Scalars that can be read from and written to CSV columns.
trait CliScalar: Scalar + Serialize {
    const COLUMNS: &'static [&'static str];
    fn from_row(row: &[f64]) -> Option<Self>;
    fn random(r: &mut ChaCha8Rng) -> Self;
    fn parts(self) -> Vec<f64>;
}

impl CliScalar for f64 {
    const COLUMNS: &'static [&'static str] = &[""];

    fn from_row(row: &[f64]) -> Option<Self> {
        (row.len() == 1).then(|| row[0])
    }

    fn random(r: &mut ChaCha8Rng) -> Self {
        StandardNormal.sample(r)
    }

    fn parts(self) -> Vec<f64> {
        vec![self]
    }
}

impl CliScalar for Complex64 {
    const COLUMNS: &'static [&'static str] = &["_re", "_im"];

    fn from_row(row: &[f64]) -> Option<Self> {
        match row {
            [re] => Some(Complex64::new(*re, 0.0)),
            [re, im] => Some(Complex64::new(*re, *im)),
            _ => None,
        }
    }

    fn random(r: &mut ChaCha8Rng) -> Self {
        Complex64::new(StandardNormal.sample(r), StandardNormal.sample(r))
    }

    fn parts(self) -> Vec<f64> {
        vec![self.re, self.im]
    }
}

fn columns<T: CliScalar>(name: &str) -> Vec<String> {
    T::COLUMNS.iter().map(|c| format!("{name}{c}")).collect()
}

fn cells<T: CliScalar>(v: T) -> Vec<String> {
    v.parts().into_iter().map(num).collect()
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

/// `f` from `--input`, or seeded normal coefficients on the first `lead` modes.
fn ground_function<T: CliScalar>(
    cfg: &RunConfig,
    sp: &Spectrum<T>,
    lead: usize,
) -> Result<GroundFunction<T>> {
    match &cfg.input {
        Some(path) => {
            let rows = read_rows(path)?;
            let values = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    T::from_row(r).ok_or_else(|| {
                        Error::InvalidArgument(format!(
                            "{}:{}: expected {} column(s)",
                            path.display(),
                            i + 1,
                            T::COLUMNS.len()
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            project(&GroundFunction::from_values(values), sp)
        }
        None => {
            let mut r = rng(cfg.seed);
            let c: Vec<T> = (0..lead.min(sp.mode_count())).map(|_| T::random(&mut r)).collect();
            synthesize(&c, sp)
        }
    }
}

/// Subcommands that act on one spectrum of either scalar type.
trait SpectrumTask {
    fn run<T: CliScalar>(&self, cfg: &RunConfig, sp: &Spectrum<T>) -> Result<Outcome>;
}

fn with_spectrum(cfg: &RunConfig, task: impl SpectrumTask) -> Result<Outcome> {
    match build_any(&backend_spec(cfg)?)? {
        AnySpectrum::Real(sp) => task.run(cfg, &sp),
        AnySpectrum::Complex(sp) => task.run(cfg, &sp),
    }
}

struct Spectrum_;

impl SpectrumTask for Spectrum_ {
    fn run<T: CliScalar>(&self, _cfg: &RunConfig, sp: &Spectrum<T>) -> Result<Outcome> {
        let mut table = Table::new(&["k", "eigenvalue"]);
        for (k, lam) in sp.eigenvalues().iter().enumerate() {
            table.push(vec![(k + 1).to_string(), num(*lam)]);
        }
        let defect = sp.orthonormality_defect();
        let critical = sp.critical_exponent();
        let results = json!({
            "eigenvalues": sp.eigenvalues(),
            "node_count": sp.node_count(),
            "mode_count": sp.mode_count(),
            "orthonormality_defect": defect,
            "critical_exponent": if critical.is_finite() { json!(critical) } else { json!("inf") },
            "grushin": sp.grushin().map(|g| json!({
                "gamma": g.gamma,
                "homogeneous_dim": g.homogeneous_dim,
                "critical_exponent": if g.critical_exponent.is_finite() {
                    json!(g.critical_exponent)
                } else {
                    json!("inf")
                },
            })),
        });
        let checks = vec![
            Check::at_most("weighted orthonormality", defect, 1e-10),
            Check::holds("lambda_1 > 0", sp.eigenvalues()[0] > 0.0),
        ];
        Ok(Outcome { results, checks, table })
    }
}

fn node_table<T: CliScalar>(sp: &Spectrum<T>, named: &[(&str, &[T])]) -> Table {
    let mut header: Vec<String> = vec!["node".into(), "x".into(), "y".into()];
    for (name, _) in named {
        header.extend(columns::<T>(name));
    }
    let mut table = Table {
        header,
        rows: Vec::new(),
    };
    for (i, p) in sp.points().iter().enumerate() {
        let mut row = vec![i.to_string(), num(p[0]), num(p[1])];
        for (_, values) in named {
            row.extend(cells(values[i]));
        }
        table.push(row);
    }
    table
}

struct FracApply;

impl SpectrumTask for FracApply {
    fn run<T: CliScalar>(&self, cfg: &RunConfig, sp: &Spectrum<T>) -> Result<Outcome> {
        let o = order(cfg)?;
        let f = ground_function(cfg, sp, 10)?;
        let g = fractional_apply(sp, &o, &f)?;
        // ⟨A^s f, f⟩ = ‖f‖²_{σ=s}
        let pairing: f64 = g
            .coefficients_for(sp)?
            .iter()
            .zip(f.coefficients_for(sp)?)
            .map(|(a, b)| (a.conjugate() * *b).real())
            .sum();
        let norm = interpolation_norm(sp, o.s(), &f)?;
        let results = json!({
            "s": o.s(),
            "coefficients": g.coefficients_for(sp)?,
            "values": g.values,
            "pairing": pairing,
            "interpolation_norm_sq": norm * norm,
        });
        let checks = vec![Check::at_most(
            "<A^s f, f> = sum lambda^s |c|^2",
            (pairing - norm * norm).abs() / (norm * norm).max(f64::MIN_POSITIVE),
            1e-10,
        )];
        let table = node_table(sp, &[("f", &f.values), ("frac", &g.values)]);
        Ok(Outcome { results, checks, table })
    }
}

struct ExtensionEval;

impl SpectrumTask for ExtensionEval {
    fn run<T: CliScalar>(&self, cfg: &RunConfig, sp: &Spectrum<T>) -> Result<Outcome> {
        let o = order(cfg)?;
        let t = cfg
            .t
            .ok_or_else(|| Error::InvalidArgument("--t is required".into()))?;
        let f = ground_function(cfg, sp, 10)?;
        let alpha = extension_coefficients(sp, &o, &f, t)?;
        let u = evaluate_extension(sp, &o, &f, t)?;
        let (nf, nu) = (sp.l2_norm(&f.values), sp.l2_norm(&u.values));
        let results = json!({
            "s": o.s(),
            "t": t,
            "coefficients": alpha,
            "values": u.values,
            "trace_norm": nf,
            "norm": nu,
        });
        let checks = vec![Check::at_most("||u(t)|| <= ||f||", nu - nf, 1e-12 * nf.max(1.0))];
        let table = node_table(sp, &[("f", &f.values), ("u", &u.values)]);
        Ok(Outcome { results, checks, table })
    }
}

fn quadrature(cfg: &RunConfig, o: &FracOrder, lambda_min: f64) -> Result<HalfLineQuadrature> {
    let a = 1.0 - 2.0 * o.s();
    match cfg.tmax {
        Some(tmax) => half_line_quadrature(o, a, tmax, cfg.quad_nodes),
        None => HalfLineQuadrature::for_lowest_eigenvalue(o, a, lambda_min, cfg.quad_nodes),
    }
}

struct EnergyCheck;

impl SpectrumTask for EnergyCheck {
    fn run<T: CliScalar>(&self, cfg: &RunConfig, sp: &Spectrum<T>) -> Result<Outcome> {
        let o = order(cfg)?;
        let f = ground_function(cfg, sp, 20)?;
        let quad = quadrature(cfg, &o, sp.eigenvalues()[0])?;
        let lhs = extension_energy(sp, &o, &f, &quad)?;
        let rhs = spectral_energy(sp, &o, &f)?;
        let rel_err = if rhs == 0.0 { lhs.abs() } else { (lhs - rhs).abs() / rhs };
        let results = json!({
            "s": o.s(),
            "ks": o.ks(),
            "lhs": lhs,
            "rhs": rhs,
            "rel_err": rel_err,
            "quad_points": quad.len(),
            "tmax": quad.tmax(),
        });
        let mut table = Table::new(&["k", "eigenvalue", "coefficient_sq", "spectral_term"]);
        for (k, (c, lam)) in f.coefficients_for(sp)?.iter().zip(sp.eigenvalues()).enumerate() {
            let c2 = c.modulus_squared();
            table.push(vec![
                (k + 1).to_string(),
                num(*lam),
                num(c2),
                num(o.ks() * lam.powf(o.s()) * c2),
            ]);
        }
        Ok(Outcome {
            results,
            checks: vec![Check::at_most("energy identity", rel_err, 1e-6)],
            table,
        })
    }
}

struct Compactness;

impl SpectrumTask for Compactness {
    fn run<T: CliScalar>(&self, cfg: &RunConfig, sp: &Spectrum<T>) -> Result<Outcome> {
        let o = order(cfg)?;
        let rep = match cfg.rank {
            Some(n) => {
                let entry = truncation_modulus(sp, &o, n, cfg.seed)?;
                CompactnessReport {
                    s: o.s(),
                    seed: cfg.seed,
                    samples: crate::analysis::MONTE_CARLO_SAMPLES,
                    energy_scale: o.ks().sqrt(),
                    entries: vec![entry],
                }
            }
            None => compactness_report(sp, &o, cfg.seed)?,
        };
        let mut table = Table::new(&["rank", "modulus", "bound", "energy_modulus", "monte_carlo_max"]);
        for e in &rep.entries {
            table.push(vec![
                e.rank.to_string(),
                num(e.modulus),
                num(e.bound),
                num(e.energy_modulus),
                num(e.monte_carlo_max),
            ]);
        }
        let checks = vec![
            Check::at_most("witness attains bound", rep.witness_defect(), 1e-12),
            Check::at_most("Monte Carlo below bound", rep.monte_carlo_excess().max(0.0), 1e-12),
            Check::holds("moduli non-increasing", rep.is_non_increasing()),
        ];
        Ok(Outcome {
            results: serde_json::to_value(&rep).expect("report serializes"),
            checks,
            table,
        })
    }
}

fn dtn_check(cfg: &RunConfig) -> Result<Outcome> {
    let o = order(cfg)?;
    let p = mode_profile(cfg.lambda, o, cfg.c0)?;
    let value = dtn_limit(&p)?;
    let expected = o.ks() * cfg.lambda.powf(o.s()) * cfg.c0;
    let rel_err = if expected == 0.0 {
        value.abs()
    } else {
        (value - expected).abs() / expected.abs()
    };
    let mut table = Table::new(&["t", "flux"]);
    for m in 2..=5 {
        let t = 10f64.powi(-m) / cfg.lambda.sqrt();
        table.push(vec![num(t), num(if cfg.c0 == 0.0 { 0.0 } else { p.flux(t) })]);
    }
    Ok(Outcome {
        results: json!({
            "s": o.s(),
            "ks": o.ks(),
            "lambda": cfg.lambda,
            "c0": cfg.c0,
            "value": value,
            "expected": expected,
            "rel_err": rel_err,
        }),
        checks: vec![Check::at_most("dtn = K(s) lambda^s c0", rel_err, 1e-5)],
        table,
    })
}

fn tail_check(cfg: &RunConfig) -> Result<Outcome> {
    let spec = backend_spec(cfg)?;
    let sp = match build_any(&spec)? {
        AnySpectrum::Real(sp) => sp,
        AnySpectrum::Complex(_) => {
            return Err(Error::InvalidBackend("tail-check needs an oscillator backend".into()))
        }
    };
    let radius = cfg
        .radius
        .ok_or_else(|| Error::InvalidArgument("--radius is required".into()))?;
    let f = ground_function(cfg, &sp, 10)?;
    let tail = tail_mass_check(&sp, &f, radius)?;
    let mut checks = vec![Check::at_most("tail - E/R^2", tail.tail - tail.bound, 0.0)];
    let mut results = json!({
        "radius": radius,
        "tail": tail.tail,
        "bound": tail.bound,
        "energy": tail.energy,
    });
    let mut table = Table::new(&["quantity", "value"]);
    table.push(vec!["tail".into(), num(tail.tail)]);
    table.push(vec!["bound".into(), num(tail.bound)]);
    if let Some(q) = cfg.q {
        let lp = lp_interpolation_check(&f, q, &sp)?;
        checks.push(Check::at_most("||f||_q / (||f||_2^(1-t) ||f||_2*^t) - 1", lp.lhs / lp.rhs - 1.0, 1e-12));
        results["lp"] = json!({
            "q": lp.q,
            "t": lp.t,
            "lhs": lp.lhs,
            "rhs": lp.rhs,
            "critical_exponent": if lp.p.is_finite() { json!(lp.p) } else { json!("inf") },
        });
        table.push(vec!["lp_lhs".into(), num(lp.lhs)]);
        table.push(vec!["lp_rhs".into(), num(lp.rhs)]);
    }
    Ok(Outcome { results, checks, table })
}

fn diamagnetic(cfg: &RunConfig) -> Result<Outcome> {
    let spec = backend_spec(cfg)?;
    if spec.kind != BackendKind::MagneticFd {
        return Err(Error::InvalidBackend("diamagnetic-check needs --backend magnetic-fd".into()));
    }
    spec.validate()?;
    let n = spec.grid.expect("validated");
    let grid = MagneticGrid::landau(n, spec.length.expect("validated"), spec.flux.expect("validated"));
    let u: Vec<Complex64> = match &cfg.input {
        Some(path) => read_rows(path)?
            .iter()
            .enumerate()
            .map(|(i, r)| {
                Complex64::from_row(r).ok_or_else(|| {
                    Error::InvalidArgument(format!("{}:{}: expected re,im", path.display(), i + 1))
                })
            })
            .collect::<Result<_>>()?,
        None => {
            let mut r = rng(cfg.seed);
            (0..n * n).map(|_| Complex64::random(&mut r)).collect()
        }
    };
    let d = diamagnetic_check(&grid, &u)?;
    let mut table = Table::new(&["form", "value"]);
    table.push(vec!["q0".into(), num(d.q0)]);
    table.push(vec!["qA".into(), num(d.qa)]);
    Ok(Outcome {
        results: json!({ "q0": d.q0, "qA": d.qa, "edges": grid.edges().len() }),
        checks: vec![Check::at_most("q0 - qA", d.q0 - d.qa, 1e-12)],
        table,
    })
}

fn suite_report(cfg: &RunConfig) -> Result<Outcome> {
    let criteria = run_suite(cfg.seed)?;
    let mut checks = Vec::new();
    let mut table = Table::new(&["criterion", "check", "pass", "value", "bound"]);
    for c in &criteria {
        for k in &c.checks {
            table.push(vec![
                c.id.to_string(),
                k.name.clone(),
                k.pass.to_string(),
                num(k.value),
                num(k.bound),
            ]);
            checks.push(Check {
                name: format!("[{}] {}", c.id, k.name),
                ..k.clone()
            });
        }
    }
    let summary: Vec<Value> = criteria
        .iter()
        .map(|c| json!({ "id": c.id, "title": c.title, "pass": c.pass }))
        .collect();
    Ok(Outcome {
        results: json!({
            "criteria": summary,
            "all_pass": criteria.iter().all(|c| c.pass),
        }),
        checks,
        table,
    })
}
