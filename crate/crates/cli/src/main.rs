//! `curvkep`: simulate, dualize, verify and classify from the command line.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or domain error.

mod config;
mod csv;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use curvkep::duality::{
    charge_transport_residual, kepler_eom_residual, make_dictionary, map_trajectory, two_form_correspondence,
    ENERGY_DRIFT_LIMIT,
};
use curvkep::flows::{drift_report, integrate, integrate_regularized_geodesic_from};
use curvkep::verify::{classify_geodesic, classify_kepler, run_suite, Classification, Suite, EOM_TOLERANCE};
use curvkep::{
    Branch, Chart, ChartedGeodesicState, Error, IntegratorConfig, KeplerParams, PhasePoint, Sheet, System, SystemTag,
    Trajectory,
};

use config::{parse_triple, BranchKind, ChartKind, RunConfig, SheetKind, SystemKind};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, files or formats.
    Usage(String),
    /// The library rejected the input.
    Domain(Error),
    /// The command ran but a check did not pass.
    Check(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) | CliError::Domain(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(e) => write!(f, "domain error: {e}"),
            CliError::Check(m) => write!(f, "check failed: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "curvkep", version, about = "Kepler motion and geodesic flow on constant-curvature 3-spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a Kepler or geodesic flow and write a trajectory CSV plus a JSON sidecar.
    Simulate(SimulateArgs),
    /// Map a transformed-chart geodesic trajectory to the dual Kepler trajectory.
    Dualize(DualizeArgs),
    /// Run a verification suite and print a JSON report.
    Verify(VerifyArgs),
    /// Name the Lie algebra of the conserved charges.
    Classify(ClassifyArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON file with any of the settings below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    system: Option<SystemKind>,
    /// Kepler coupling (nonzero).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Curvature.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
    /// Geodesic chart (default natural).
    #[arg(long, value_enum)]
    chart: Option<ChartKind>,
    /// Initial position `a,b,c`.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    x: Option<[f64; 3]>,
    /// Initial momentum `a,b,c`.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    p: Option<[f64; 3]>,
    #[arg(long)]
    t_final: Option<f64>,
    /// Sets both tolerances.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
    #[arg(long)]
    max_step: Option<f64>,
    /// Number of output rows, endpoints included.
    #[arg(long)]
    samples: Option<usize>,
    /// Switch charts through the antipodal map (natural chart, k > 0).
    #[arg(long)]
    regularize: bool,
    /// Sheet of the initial point for regularized runs.
    #[arg(long, value_enum)]
    sheet: Option<SheetKind>,
    /// Recorded in the outputs; the integration itself is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectory CSV path; the sidecar goes next to it with a `.json` extension.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DualizeArgs {
    /// Transformed-chart geodesic trajectory CSV.
    #[arg(long)]
    input: PathBuf,
    /// Sidecar of the input (default: the input path with a `.json` extension).
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Curvature, overriding the sidecar.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
    #[arg(long, value_enum, default_value = "attractive")]
    branch: BranchKind,
    /// Kepler trajectory CSV path; the report goes next to it with a `.json` extension.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// brackets, symplectic, constants, duality or regularize.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Random points per check.
    #[arg(long)]
    samples: Option<usize>,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Curvature of the geodesic system.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "energy")]
    k: Option<f64>,
    /// Kepler energy.
    #[arg(long, allow_hyphen_values = true)]
    energy: Option<f64>,
    /// System the parameter refers to (inferred from the flag when omitted).
    #[arg(long, value_enum)]
    system: Option<SystemKind>,
    /// Print the full bracket table as JSON.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Dualize(a) => dualize(a),
        Command::Verify(a) => verify(a),
        Command::Classify(a) => classify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("curvkep: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn file_config(path: &Option<PathBuf>) -> Result<RunConfig, CliError> {
    path.as_deref().map_or(Ok(RunConfig::default()), RunConfig::load)
}

fn require<T>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{name}")))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Fully resolved simulate settings, echoed into the sidecar.
#[derive(Debug, Serialize)]
struct SimulateSettings {
    system: SystemKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chart: Option<ChartKind>,
    x: [f64; 3],
    p: [f64; 3],
    t_final: f64,
    rtol: f64,
    atol: f64,
    /// `null` means unlimited.
    max_step: Option<f64>,
    samples: usize,
    regularize: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    sheet: Option<SheetKind>,
    seed: u64,
    out: PathBuf,
}

fn resolve_simulate(a: SimulateArgs) -> Result<SimulateSettings, CliError> {
    let flags = RunConfig {
        system: a.system,
        alpha: a.alpha,
        k: a.k,
        chart: a.chart,
        x: a.x,
        p: a.p,
        t_final: a.t_final,
        tol: a.tol,
        rtol: a.rtol,
        atol: a.atol,
        max_step: a.max_step,
        samples: a.samples,
        regularize: a.regularize.then_some(true),
        sheet: a.sheet,
        seed: a.seed,
        suite: None,
        out: a.out,
    };
    let c = flags.over(file_config(&a.config)?);
    let system = require(c.system, "system")?;
    let (alpha, k, chart) = match system {
        SystemKind::Kepler => {
            if c.k.is_some() || c.chart.is_some() {
                return Err(CliError::Usage("--k and --chart do not apply to the kepler system".into()));
            }
            (Some(require(c.alpha, "alpha")?), None, None)
        }
        SystemKind::Geodesic => {
            if c.alpha.is_some() {
                return Err(CliError::Usage("--alpha does not apply to the geodesic system".into()));
            }
            (None, Some(require(c.k, "k")?), Some(c.chart.unwrap_or(ChartKind::Natural)))
        }
    };
    let regularize = c.regularize.unwrap_or(false);
    if regularize && chart != Some(ChartKind::Natural) {
        return Err(CliError::Usage("--regularize needs the geodesic system in the natural chart".into()));
    }
    if c.sheet.is_some() && !regularize {
        return Err(CliError::Usage("--sheet only applies with --regularize".into()));
    }
    let defaults = IntegratorConfig::default();
    Ok(SimulateSettings {
        system,
        alpha,
        k,
        chart,
        x: require(c.x, "x")?,
        p: require(c.p, "p")?,
        t_final: require(c.t_final, "t-final")?,
        rtol: c.rtol.or(c.tol).unwrap_or(defaults.rtol),
        atol: c.atol.or(c.tol).unwrap_or(defaults.atol),
        max_step: c.max_step,
        samples: c.samples.unwrap_or(defaults.samples),
        regularize,
        sheet: regularize.then(|| c.sheet.unwrap_or(SheetKind::Primary)),
        seed: c.seed.unwrap_or(0),
        out: require(c.out, "out")?,
    })
}

fn chart_of(kind: ChartKind) -> Chart {
    match kind {
        ChartKind::Natural => Chart::Natural,
        ChartKind::Transformed => Chart::Transformed,
    }
}

fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let s = resolve_simulate(a)?;
    let cfg = IntegratorConfig {
        rtol: s.rtol,
        atol: s.atol,
        max_step: s.max_step.unwrap_or(f64::INFINITY),
        samples: s.samples,
        ..IntegratorConfig::default()
    };
    let start = PhasePoint::from_arrays(s.x, s.p);
    let traj = match (s.alpha, s.k, s.chart) {
        (Some(alpha), _, _) => integrate(System::Kepler(KeplerParams::new(alpha)?), &start, s.t_final, &cfg)?,
        (None, Some(k), Some(chart)) if s.regularize => {
            let sheet = match s.sheet {
                Some(SheetKind::Antipodal) => Sheet::Antipodal,
                _ => Sheet::Primary,
            };
            let state = ChartedGeodesicState::new(start, chart_of(chart), k)?;
            integrate_regularized_geodesic_from(k, &state, sheet, s.t_final, &cfg)?
        }
        (None, Some(k), Some(chart)) => {
            integrate(System::Geodesic { k, chart: chart_of(chart) }, &start, s.t_final, &cfg)?
        }
        _ => unreachable!("settings are resolved"),
    };
    csv::write(&s.out, &traj.samples)?;
    let sidecar = json!({
        "command": "simulate",
        "config": &s,
        "system": traj.system,
        "parameter": traj.parameter,
        "samples": traj.samples.len(),
        "accepted_steps": traj.accepted_steps,
        "rejected_steps": traj.rejected_steps,
        "drift": drift_report(&traj),
        "switches": &traj.switches,
        "truncated": traj.is_truncated(),
        "truncation": &traj.truncation,
    });
    write_json(&s.out.with_extension("json"), &sidecar)?;
    if let Some(t) = &traj.truncation {
        return Err(CliError::Domain(Error::InvalidInput(format!(
            "trajectory truncated at t = {}: {} (partial trajectory written)",
            t.t, t.message
        ))));
    }
    Ok(())
}

/// What dualize needs from a simulate sidecar.
#[derive(Debug, serde::Deserialize)]
struct InputMeta {
    system: SystemTag,
    parameter: f64,
}

fn read_meta(path: &Path) -> Result<InputMeta, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid sidecar {}: {e}", path.display())))
}

fn dualize(a: DualizeArgs) -> Result<(), CliError> {
    let samples = csv::read(&a.input)?;
    let meta_path = a.meta.clone().unwrap_or_else(|| a.input.with_extension("json"));
    let meta = if a.meta.is_some() || meta_path.exists() { Some(read_meta(&meta_path)?) } else { None };
    let k = match (a.k, &meta) {
        (Some(k), _) => k,
        (None, Some(m)) => m.parameter,
        (None, None) => return Err(CliError::Usage("no sidecar found; pass --k".into())),
    };
    let branch = match a.branch {
        BranchKind::Attractive => Branch::Attractive,
        BranchKind::Repulsive => Branch::Repulsive,
    };
    let c = samples[0].energy;
    let dict = make_dictionary(k, c, branch)?;
    if let Some(m) = &meta {
        if m.system != SystemTag::GeodesicTransformed {
            return Err(CliError::Usage(format!(
                "input is a {} trajectory; dualize needs geodesic-transformed",
                m.system.as_str()
            )));
        }
    }
    let geo = Trajectory {
        system: SystemTag::GeodesicTransformed,
        parameter: k,
        samples,
        config: None,
        switches: Vec::new(),
        truncation: None,
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let drift = drift_report(&geo).energy;
    if drift > ENERGY_DRIFT_LIMIT {
        return Err(CliError::Check(format!("G drifts by {drift:e} along the input (limit {ENERGY_DRIFT_LIMIT:e})")));
    }
    let kep = map_trajectory(&geo, &dict)?;
    let two_form = two_form_correspondence(&geo, &kep, &dict)?;
    let charges = charge_transport_residual(&geo, &kep)?;
    let eom = kepler_eom_residual(&kep, &dict.kepler_params()?)?;
    csv::write(&a.out, &kep.samples)?;
    let passed = two_form.passed && charges < curvkep::verify::CHARGE_TRANSPORT_TOLERANCE && eom < EOM_TOLERANCE;
    let report = json!({
        "command": "dualize",
        "input": &a.input,
        "branch": a.branch,
        "k": dict.k,
        "C": dict.c,
        "E": dict.energy,
        "alpha": dict.alpha,
        "samples": kep.samples.len(),
        "geodesic_energy_drift": drift,
        "two_form": two_form,
        "charge_transport_residual": charges,
        "kepler_eom_residual": eom,
        "passed": passed,
    });
    write_json(&a.out.with_extension("json"), &report)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Check(format!("correspondence residuals above tolerance: {report}")))
    }
}

fn verify(a: VerifyArgs) -> Result<(), CliError> {
    let flags = RunConfig { suite: a.suite, seed: a.seed, samples: a.samples, out: a.out, ..Default::default() };
    let c = flags.over(file_config(&a.config)?);
    let suite: Suite = require(c.suite, "suite")?
        .parse()
        .map_err(|e: Error| CliError::Usage(format!("{e}; expected one of brackets, symplectic, constants, duality, regularize")))?;
    let report = run_suite(suite, c.seed.unwrap_or(0), c.samples.unwrap_or(100))?;
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Usage(e.to_string()))?;
    println!("{text}");
    if let Some(out) = &c.out {
        write_json(out, &report)?;
    }
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(CliError::Check(failed.join(", ")))
    }
}

fn classify(a: ClassifyArgs) -> Result<(), CliError> {
    let system = a.system.unwrap_or(if a.energy.is_some() { SystemKind::Kepler } else { SystemKind::Geodesic });
    let c: Classification = match system {
        SystemKind::Geodesic => classify_geodesic(require(a.k, "k")?)?,
        SystemKind::Kepler => classify_kepler(require(a.energy, "energy")?)?,
    };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&c).map_err(|e| CliError::Usage(e.to_string()))?);
        return Ok(());
    }
    let symbol = if c.system == "kepler" { "E" } else { "k" };
    println!("{}", c.algebra);
    println!("system {} with {symbol} = {}", c.system, c.parameter);
    println!("bracket table label {} at the representative point", c.table_algebra);
    println!("max bracket residual {:e}", c.max_residual);
    for e in &c.table.entries {
        println!("{{{},{}}} = {} (expected {}, residual {:e})", e.left, e.right, e.computed, e.expected, e.residual);
    }
    Ok(())
}
