//! `metasinr` command line: `curve`, `compare` and `table`.
//!
//! Exit codes: 0 success, 2 usage or unsupported combination, 3 numerical
//! failure, 1 I/O.

pub mod grid;
pub mod table;

use crate::error::Error;
use crate::geometry::{ChannelModel, NetworkModel};
use crate::manifest::RunManifest;
use crate::metadist::{meta_curve, CurveOptions, InterferenceMode, Method, ProposedOptions, QuadratureSpec};
use crate::simkit::{compare_curves, default_gamma_grid, simulate_meta_multi, ComparisonReport, KlConvention, SimulationConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use grid::{db_to_linear, parse_tiers, parse_values};
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Debug, Parser)]
#[command(name = "metasinr", version, about = "SINR meta distribution of downlink wireless networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one method on a (θ, γ) grid and print CSV.
    Curve(CurveArgs),
    /// Compare two methods on the same grid and print JSON.
    Compare(CompareArgs),
    /// Reproduce a KL-divergence table (1-4).
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Ppp,
    Bipolar,
    Mcp,
    Ktier,
    Plcp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliMethod {
    Proposed,
    ProposedJ,
    Beta,
    Exact,
    NearestOnly,
    Sim,
}

impl From<CliMethod> for Method {
    fn from(m: CliMethod) -> Self {
        match m {
            CliMethod::Proposed => Method::Proposed,
            CliMethod::ProposedJ => Method::ProposedJ,
            CliMethod::Beta => Method::Beta,
            CliMethod::Exact => Method::ExactGilpelaez,
            CliMethod::NearestOnly => Method::NearestOnly,
            CliMethod::Sim => Method::Simulation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliInterference {
    Plcp,
    PppApprox,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "ppp")]
    pub model: ModelKind,
    /// BS (or parent) density, per km².
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Bipolar link distance, km.
    #[arg(long)]
    pub bipolar_r: Option<f64>,
    /// Cluster radius, km.
    #[arg(long)]
    pub rc: Option<f64>,
    /// Tiers as `lambda:power,lambda:power,...`.
    #[arg(long)]
    pub tiers: Option<String>,
    /// Line density, km per km².
    #[arg(long)]
    pub lambda_l: Option<f64>,
    /// BS density on each line, per km.
    #[arg(long)]
    pub lambda_p: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    pub alpha: f64,
    /// Transmit power, W.
    #[arg(long, default_value_t = 10.0)]
    pub pt: f64,
    /// Noise power, W.
    #[arg(long, default_value_t = 1e-9)]
    pub sigma2: f64,
}

impl ModelArgs {
    pub fn network(&self) -> Result<NetworkModel, CliError> {
        let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| CliError::Usage(format!("--model {:?} needs --{flag}", self.model).to_lowercase()));
        let m = match self.model {
            ModelKind::Ppp => NetworkModel::Ppp { lambda: self.lambda },
            ModelKind::Bipolar => NetworkModel::Bipolar { lambda: self.lambda, r: need(self.bipolar_r, "bipolar-r")? },
            ModelKind::Mcp => NetworkModel::Mcp { lambda: self.lambda, rc: need(self.rc, "rc")? },
            ModelKind::Ktier => {
                let t = self.tiers.as_deref().ok_or_else(|| CliError::Usage("--model ktier needs --tiers".into()))?;
                NetworkModel::KTier { tiers: parse_tiers(t).map_err(CliError::Usage)? }
            }
            ModelKind::Plcp => NetworkModel::Plcp { lambda_l: need(self.lambda_l, "lambda-l")?, lambda_p: need(self.lambda_p, "lambda-p")? },
        };
        m.validate()?;
        Ok(m)
    }

    pub fn channel(&self) -> Result<ChannelModel, CliError> {
        Ok(ChannelModel::new(self.alpha, self.pt, self.sigma2)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Thresholds in dB: `x`, `a,b,c` or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub theta_db: String,
    /// Reliability thresholds, same syntax.
    #[arg(long, default_value = "0.01:0.99:0.01")]
    pub gamma: String,
}

impl GridArgs {
    fn parse(&self) -> Result<(Vec<f64>, Vec<f64>), CliError> {
        let t = parse_values(&self.theta_db).map_err(|e| CliError::Usage(format!("--theta-db: {e}")))?;
        let g = parse_values(&self.gamma).map_err(|e| CliError::Usage(format!("--gamma: {e}")))?;
        if g.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(CliError::Usage("--gamma values must lie in [0,1]".into()));
        }
        Ok((t, g))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Network realizations.
    #[arg(long, default_value_t = 100)]
    pub realizations: usize,
    /// Users per realization.
    #[arg(long, default_value_t = 500)]
    pub links: usize,
    /// BS window radius, km (default 30/sqrt(BS density)).
    #[arg(long)]
    pub window: Option<f64>,
    /// Average over this many fading draws instead of the closed form.
    #[arg(long)]
    pub fading_draws: Option<usize>,
}

impl SimArgs {
    fn config(&self, gammas: &[f64]) -> SimulationConfig {
        SimulationConfig {
            n_realizations: self.realizations,
            n_links_per_realization: self.links,
            window_radius: self.window,
            seed: self.seed,
            gamma_grid: gammas.to_vec(),
            fading_draws: self.fading_draws,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    /// Interferers treated exactly by `proposed-j`.
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    #[arg(long, value_enum, default_value = "plcp")]
    pub plcp_interference: CliInterference,
}

impl MethodArgs {
    fn options(&self) -> CurveOptions {
        let interference = match self.plcp_interference {
            CliInterference::Plcp => InterferenceMode::Plcp,
            CliInterference::PppApprox => InterferenceMode::PppApprox,
        };
        CurveOptions { proposed: ProposedOptions { interference, zero_mean_field: false }, j: self.j, ..Default::default() }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value = "proposed")]
    pub method: CliMethod,
    #[command(flatten)]
    pub method_opts: MethodArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Write to this file (plus a `.manifest.json` sidecar) instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Two methods: `--method proposed --method sim` or `--method proposed,sim`.
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub method: Vec<CliMethod>,
    #[command(flatten)]
    pub method_opts: MethodArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub table: u8,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Raw (unnormalized) cell masses, as in the published tables.
    #[arg(long)]
    pub paper_convention: bool,
    /// Fraction of the default 100 network realizations to simulate.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 500)]
    pub links: usize,
    /// Also write the entries as CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(Error::Convergence { .. }) => 3,
            CliError::Lib(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

/// Values of one method over `thetas × gammas`, θ-major, with standard
/// errors for simulation.
struct Evaluated {
    method: Method,
    values: Vec<f64>,
    std_err: Option<Vec<f64>>,
}

fn evaluate(
    model: &NetworkModel,
    channel: &ChannelModel,
    method: CliMethod,
    thetas_db: &[f64],
    gammas: &[f64],
    opts: &MethodArgs,
    sim: &SimArgs,
    quad: &QuadratureSpec,
) -> Result<Evaluated, CliError> {
    let thetas: Vec<f64> = thetas_db.iter().map(|&d| db_to_linear(d)).collect();
    let m: Method = method.into();
    if m == Method::Simulation {
        let e = simulate_meta_multi(model, channel, &thetas, &sim.config(gammas))?;
        return Ok(Evaluated {
            method: m,
            values: e.iter().flat_map(|x| x.ccdf.iter().copied()).collect(),
            std_err: Some(e.iter().flat_map(|x| x.std_err.iter().copied()).collect()),
        });
    }
    let c = meta_curve(model, channel, m, &thetas, gammas, quad, &opts.options())?;
    Ok(Evaluated { method: m, values: c.values, std_err: None })
}

fn base_manifest(command: &str, seed: u64, model: &ModelArgs, quad: &QuadratureSpec) -> Result<RunManifest, CliError> {
    let mut m = RunManifest::new(command, seed);
    m.model = Some(model.network()?);
    m.channel = Some(model.channel()?);
    m.quad = Some(*quad);
    Ok(m)
}

fn emit(out: &Option<PathBuf>, body: &str, mut manifest: RunManifest, started: Instant) -> Result<(), CliError> {
    match out {
        Some(p) => {
            std::fs::write(p, body)?;
            manifest.wall_time = Some(started.elapsed().as_secs_f64());
            manifest.write_sidecar(p)?;
        }
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

pub fn cmd_curve(a: &CurveArgs) -> Result<String, CliError> {
    let model = a.model.network()?;
    let channel = a.model.channel()?;
    let (thetas_db, gammas) = a.grid.parse()?;
    let quad = QuadratureSpec::default();
    let ev = evaluate(&model, &channel, a.method, &thetas_db, &gammas, &a.method_opts, &a.sim, &quad)?;
    let mut s = String::from(if ev.std_err.is_some() { "theta_db,gamma,method,value,std_err\n" } else { "theta_db,gamma,method,value\n" });
    let mut k = 0;
    for &t in &thetas_db {
        for &g in &gammas {
            s.push_str(&format!("{t},{g},{},{}", ev.method.tag(), ev.values[k]));
            if let Some(se) = &ev.std_err {
                s.push_str(&format!(",{}", se[k]));
            }
            s.push('\n');
            k += 1;
        }
    }
    Ok(s)
}

#[derive(Debug, Serialize)]
pub struct CompareOutput {
    pub sup_gap: f64,
    pub reports: Vec<ComparisonReport>,
    pub manifest: RunManifest,
}

pub fn cmd_compare(a: &CompareArgs) -> Result<CompareOutput, CliError> {
    if a.method.len() != 2 {
        return Err(CliError::Usage(format!("compare needs exactly two methods, got {}", a.method.len())));
    }
    let model = a.model.network()?;
    let channel = a.model.channel()?;
    let (thetas_db, gammas) = a.grid.parse()?;
    let quad = QuadratureSpec::default();
    let ea = evaluate(&model, &channel, a.method[0], &thetas_db, &gammas, &a.method_opts, &a.sim, &quad)?;
    let eb = evaluate(&model, &channel, a.method[1], &thetas_db, &gammas, &a.method_opts, &a.sim, &quad)?;
    let n = gammas.len();
    let reports = thetas_db
        .iter()
        .enumerate()
        .map(|(i, &db)| {
            let r = i * n..(i + 1) * n;
            compare_curves(ea.method.tag(), &ea.values[r.clone()], eb.method.tag(), &eb.values[r], db_to_linear(db), &gammas)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut manifest = base_manifest("compare", a.sim.seed, &a.model, &quad)?;
    if ea.std_err.is_some() || eb.std_err.is_some() {
        manifest.sim = Some(a.sim.config(&gammas));
    }
    manifest.parameters = serde_json::json!({
        "methods": [ea.method.tag(), eb.method.tag()],
        "theta_db": thetas_db,
        "gamma": gammas,
        "j": a.method_opts.j,
        "plcp_interference": a.method_opts.options().proposed.interference,
    });
    Ok(CompareOutput { sup_gap: reports.iter().map(|r| r.sup_gap).fold(0.0, f64::max), reports, manifest })
}

fn table_sim(a: &TableArgs) -> Result<SimulationConfig, CliError> {
    if !(a.scale > 0.0 && a.scale.is_finite()) {
        return Err(CliError::Usage("--scale must be positive".into()));
    }
    Ok(SimulationConfig {
        n_realizations: ((100.0 * a.scale).round() as usize).max(2),
        n_links_per_realization: a.links,
        seed: a.seed,
        gamma_grid: default_gamma_grid(),
        ..Default::default()
    })
}

fn run_command(cli: &Cli) -> Result<(), CliError> {
    let started = Instant::now();
    match &cli.command {
        Command::Curve(a) => {
            let body = cmd_curve(a)?;
            let quad = QuadratureSpec::default();
            let mut m = base_manifest("curve", a.sim.seed, &a.model, &quad)?;
            let (t, g) = a.grid.parse()?;
            if a.method == CliMethod::Sim {
                m.sim = Some(a.sim.config(&g));
            }
            m.parameters = serde_json::json!({
                "method": Method::from(a.method).tag(),
                "theta_db": t,
                "gamma": g,
                "j": a.method_opts.j,
                "plcp_interference": a.method_opts.options().proposed.interference,
            });
            emit(&a.out, &body, m, started)
        }
        Command::Compare(a) => {
            let out = cmd_compare(a)?;
            let body = serde_json::to_string_pretty(&out).map_err(std::io::Error::other)? + "\n";
            let m = out.manifest.clone();
            emit(&a.out, &body, m, started)
        }
        Command::Table(a) => {
            let spec = table::table_spec(a.table)?;
            let sim = table_sim(a)?;
            let quad = QuadratureSpec::default();
            let convention = if a.paper_convention { KlConvention::Paper } else { KlConvention::Normalized };
            let entries = table::evaluate_table(&spec, &sim, &quad, convention)?;
            std::io::stdout().lock().write_all(table::format_table(&spec, &entries).as_bytes())?;
            if let Some(p) = &a.out {
                let mut m = RunManifest::new("table", a.seed);
                m.quad = Some(quad);
                m.sim = Some(sim);
                m.parameters = serde_json::json!({ "table": a.table, "kl_convention": convention });
                std::fs::write(p, table::table_csv(&spec, &entries))?;
                m.wall_time = Some(started.elapsed().as_secs_f64());
                m.write_sidecar(p)?;
            }
            Ok(())
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("METASINR_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| CliError::Usage(format!("METASINR_THREADS={v:?} is not a count")))?;
        if n == 0 {
            return Err(CliError::Usage("METASINR_THREADS must be at least 1".into()));
        }
        // Fails only if a pool already exists, e.g. when called twice in-process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match configure_threads().and_then(|_| run_command(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("metasinr: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("metasinr").chain(args.iter().copied())).unwrap()
    }

    fn curve(args: &[&str]) -> Result<String, CliError> {
        match parse(&[&["curve"], args].concat()).command {
            Command::Curve(a) => cmd_curve(&a),
            _ => unreachable!(),
        }
    }

    #[test]
    fn proposed_curve_rows() {
        let s = curve(&["--theta-db", "0", "--gamma", "0.1:0.9:0.1", "--method", "proposed"]).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "theta_db,gamma,method,value");
        assert_eq!(lines.len(), 10);
        assert!(lines[3].starts_with("0,0.3,proposed,"));
    }

    #[test]
    fn nearest_only_at_unit_ratio() {
        let s = curve(&["--method", "nearest-only", "--theta-db", "0", "--gamma", "0.5"]).unwrap();
        assert_eq!(s.lines().nth(1).unwrap(), "0,0.5,nearest_only,1");
    }

    #[test]
    fn sim_is_byte_deterministic() {
        let args = ["--method", "sim", "--seed", "7", "--theta-db", "-10,0", "--gamma", "0.1:0.9:0.4", "--realizations", "4", "--links", "20"];
        let a = curve(&args).unwrap();
        assert_eq!(a, curve(&args).unwrap());
        assert!(a.starts_with("theta_db,gamma,method,value,std_err\n-10,0.1,simulation,"));
    }

    #[test]
    fn beta_on_line_cox_is_usage_error() {
        let e = curve(&["--model", "plcp", "--lambda-l", "1", "--lambda-p", "1", "--method", "beta"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("line-Cox"));
    }

    #[test]
    fn missing_model_parameter() {
        let e = curve(&["--model", "mcp"]).unwrap_err();
        assert!(matches!(e, CliError::Usage(ref m) if m.contains("--rc")), "{e}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(main_with(["metasinr", "curve", "--model", "nope"]), 2);
        assert_eq!(main_with(["metasinr", "table", "--table", "9"]), 2);
        assert_eq!(main_with(["metasinr", "curve", "--alpha", "1.5"]), 2);
        let conv = CliError::Lib(Error::Convergence { context: "x".into(), value: 0.0, abs_err: 1.0, iterations: 1 });
        assert_eq!(conv.exit_code(), 3);
    }

    #[test]
    fn compare_identical_methods() {
        let a = match parse(&["compare", "--method", "proposed,proposed", "--theta-db", "0", "--gamma", "0.1:0.9:0.1"]).command {
            Command::Compare(a) => a,
            _ => unreachable!(),
        };
        let out = cmd_compare(&a).unwrap();
        assert_eq!(out.sup_gap, 0.0);
        assert_eq!(out.reports[0].kl_a_given_b, 0.0);
        assert!(out.manifest.wall_time.is_none());
    }

    #[test]
    fn compare_needs_two_methods() {
        let a = match parse(&["compare", "--method", "proposed"]).command {
            Command::Compare(a) => a,
            _ => unreachable!(),
        };
        assert_eq!(cmd_compare(&a).unwrap_err().exit_code(), 2);
    }
}
