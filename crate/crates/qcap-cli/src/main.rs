//! Command-line front end for the qcap solver: single solves, parameter
//! sweeps, mesh dumps, and an oracle self-check.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use qcap::adaptive::TerminalStatus;
use qcap::expr::eval_param_expr;
use qcap::geometry::Parameters;
use qcap::mesh::refine_all;
use qcap::oracle::run_verification;
use qcap::report::{
    capacitance_csv, capacitance_text, mesh_csv, sweep_csv, sweep_table, trace_csv, SolveReport,
};
use qcap::{
    build_initial_mesh, parse_cross_section, reference_run, resolve_geometry, run_adaptive,
    run_sweep, AdaptiveConfig, ControlQuantity, ConvergenceTrace, RefinementMethod, SweepReport,
    SweepSpec,
};

/// Usage errors (sysexits EX_USAGE).
const EXIT_USAGE: i32 = 64;
/// Unreadable or unparseable input data (sysexits EX_DATAERR).
const EXIT_DATA: i32 = 65;
/// The run finished but stopped on the iteration budget, not on tolerance.
const EXIT_MAX_ITERS: i32 = 2;

#[derive(Parser)]
#[command(
    name = "qcap",
    version,
    about = "Capacitance matrices of 2D transmission-line cross sections"
)]
struct Cli {
    /// Run single-threaded; without it QCAP_THREADS caps the worker pool.
    #[arg(long, global = true)]
    serial: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one cross section and report its capacitance matrix.
    Solve(SolveArgs),
    /// Perturb one parameter over a percent range, comparing adaptive runs
    /// against a dense uniform reference at every point.
    Sweep(SweepArgs),
    /// Dump the discretized boundary as CSV.
    Mesh(MeshArgs),
    /// Compare the closed-form kernels and three analytic structures
    /// against independent oracles.
    Verify(VerifyArgs),
}

/// Flags shared by every adaptive run.
#[derive(Args)]
struct AdaptFlags {
    /// Refinement method: "all" splits every element, "top:<p>" the top
    /// p percent ranked by charge magnitude.
    #[arg(long, value_name = "METHOD", default_value = "all", value_parser = parse_method)]
    method: RefinementMethod,

    /// Relative change of the control quantity that stops refinement.
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,

    /// Refinement budget, counted in linear solves after the initial one.
    #[arg(long, value_name = "N", default_value_t = 30)]
    max_iters: usize,

    /// Starting element-length expression over geometry parameters,
    /// e.g. "2*w". Required for adaptive runs.
    #[arg(long, value_name = "EXPR")]
    initial_l: Option<String>,

    /// Convergence control: "diag:<k>" watches C_kk, "fro" the Frobenius
    /// norm of the whole matrix.
    #[arg(long, value_name = "CTRL", default_value = "diag:0", value_parser = parse_control)]
    control: ControlQuantity,
}

#[derive(Args)]
struct SolveArgs {
    /// Cross-section JSON file.
    geometry: PathBuf,

    /// Solve once on a uniform mesh with this element-length expression.
    #[arg(long, value_name = "EXPR", conflicts_with_all = ["adaptive", "initial_l"])]
    uniform: Option<String>,

    /// Refine adaptively (the default mode).
    #[arg(long)]
    adaptive: bool,

    #[command(flatten)]
    adapt: AdaptFlags,

    /// Override a geometry parameter (repeatable).
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,

    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    /// Cross-section JSON file.
    geometry: PathBuf,

    /// Geometry parameter to perturb.
    #[arg(long, value_name = "NAME")]
    param: String,

    /// Percent offsets as start:stop:step, e.g. -5:5:1.
    #[arg(long, value_name = "START:STOP:STEP", value_parser = parse_range, allow_hyphen_values = true)]
    range: PercentRange,

    /// Drop the m = 0 point from the range.
    #[arg(long)]
    skip_zero: bool,

    /// Element-length expression for the uniform reference mesh.
    #[arg(long, value_name = "EXPR", default_value = "t/3")]
    reference_l: String,

    #[command(flatten)]
    adapt: AdaptFlags,

    /// Override a geometry parameter (repeatable).
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,

    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct MeshArgs {
    /// Cross-section JSON file.
    geometry: PathBuf,

    /// Element-length expression.
    #[arg(long, value_name = "EXPR")]
    l: String,

    /// Halve every element this many times after the initial build.
    #[arg(long, value_name = "N", default_value_t = 0)]
    refine_iters: usize,

    /// Override a geometry parameter (repeatable).
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,

    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Randomized kernel-versus-quadrature comparison pairs.
    #[arg(long, default_value_t = 200)]
    pairs: usize,

    /// Seed for the randomized pairs.
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Text => "text",
        }
    }
}

/// Inclusive percent range with a positive step.
#[derive(Clone, Copy, Debug)]
struct PercentRange {
    start: f64,
    stop: f64,
    step: f64,
}

impl PercentRange {
    fn expand(self, skip_zero: bool) -> Vec<f64> {
        let mut out = Vec::new();
        let mut i = 0usize;
        loop {
            let m = self.start + self.step * i as f64;
            if m > self.stop + self.step * 1e-9 {
                break;
            }
            if !(skip_zero && m.abs() < 1e-12) {
                out.push(m);
            }
            i += 1;
        }
        out
    }
}

fn parse_range(text: &str) -> Result<PercentRange, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(String::from("expected START:STOP:STEP"));
    }
    let mut nums = [0.0f64; 3];
    for (slot, part) in nums.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| format!("`{part}` is not a number"))?;
        if !slot.is_finite() {
            return Err(format!("`{part}` is not finite"));
        }
    }
    let [start, stop, step] = nums;
    if step <= 0.0 {
        return Err(String::from("step must be positive"));
    }
    if stop < start {
        return Err(String::from("stop must not precede start"));
    }
    Ok(PercentRange { start, stop, step })
}

fn parse_method(text: &str) -> Result<RefinementMethod, String> {
    if text == "all" {
        return Ok(RefinementMethod::All);
    }
    if let Some(p) = text.strip_prefix("top:") {
        let p: f64 = p.parse().map_err(|_| format!("`{p}` is not a number"))?;
        if !(p > 0.0 && p <= 100.0) {
            return Err(String::from("percent must lie in (0, 100]"));
        }
        return Ok(RefinementMethod::TopPercent(p));
    }
    Err(format!("unknown method `{text}`; use \"all\" or \"top:<p>\""))
}

fn parse_control(text: &str) -> Result<ControlQuantity, String> {
    if text == "fro" {
        return Ok(ControlQuantity::FrobeniusNorm);
    }
    if let Some(k) = text.strip_prefix("diag:") {
        let k: usize = k.parse().map_err(|_| format!("`{k}` is not an index"))?;
        return Ok(ControlQuantity::DiagonalElement(k));
    }
    Err(format!("unknown control `{text}`; use \"diag:<k>\" or \"fro\""))
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> CliError {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    fn data(message: impl Into<String>) -> CliError {
        CliError { code: EXIT_DATA, message: message.into() }
    }

    fn runtime(message: impl Into<String>) -> CliError {
        CliError { code: 1, message: message.into() }
    }
}

impl From<qcap::Error> for CliError {
    fn from(err: qcap::Error) -> CliError {
        use qcap::Error as E;
        let code = match &err {
            E::ExprSyntax { .. }
            | E::UnknownIdentifier(_)
            | E::DivisionByZero
            | E::Parse(_)
            | E::InvalidGeometry(_)
            | E::UnknownParameter(_) => EXIT_DATA,
            E::Config(_) => EXIT_USAGE,
            _ => 1,
        };
        CliError { code, message: err.to_string() }
    }
}

/// Provenance block embedded in every emitted report.
#[derive(serde::Serialize)]
struct RunManifest {
    version: &'static str,
    timestamp: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    parameters: BTreeMap<String, f64>,
    config: BTreeMap<String, String>,
}

fn build_manifest(
    input: Option<&Path>,
    params: Option<&Parameters>,
    config: Vec<(String, String)>,
) -> RunManifest {
    RunManifest {
        version: env!("CARGO_PKG_VERSION"),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        input: input.map(|p| p.display().to_string()),
        parameters: params
            .map(|p| p.pairs().iter().cloned().collect())
            .unwrap_or_default(),
        config: config.into_iter().collect(),
    }
}

/// The manifest as `#` comment lines, prepended to CSV and text reports.
fn manifest_header(m: &RunManifest) -> String {
    let mut out = format!("# qcap {}\n# timestamp: {}\n", m.version, m.timestamp);
    if let Some(input) = &m.input {
        out.push_str(&format!("# input: {input}\n"));
    }
    if !m.parameters.is_empty() {
        let joined: Vec<String> =
            m.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("# parameters: {}\n", joined.join(" ")));
    }
    if !m.config.is_empty() {
        let joined: Vec<String> =
            m.config.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("# config: {}\n", joined.join(" ")));
    }
    out
}

fn method_echo(method: RefinementMethod) -> String {
    match method {
        RefinementMethod::All => String::from("all"),
        RefinementMethod::TopPercent(p) => format!("top:{p}"),
    }
}

fn control_echo(control: ControlQuantity) -> String {
    match control {
        ControlQuantity::DiagonalElement(k) => format!("diag:{k}"),
        ControlQuantity::FrobeniusNorm => String::from("fro"),
    }
}

fn adapt_echo(adapt: &AdaptFlags) -> Vec<(String, String)> {
    let mut out = vec![
        (String::from("method"), method_echo(adapt.method)),
        (String::from("tol"), adapt.tol.to_string()),
        (String::from("max_iters"), adapt.max_iters.to_string()),
        (String::from("control"), control_echo(adapt.control)),
    ];
    if let Some(expr) = &adapt.initial_l {
        out.push((String::from("initial_l"), expr.clone()));
    }
    out
}

/// Everything a geometry-consuming subcommand needs from one input file.
struct Loaded {
    cs: qcap::CrossSection,
    rg: qcap::ResolvedGeometry,
    /// Parameter values after `--set` overrides, in file units.
    params: Parameters,
    /// Meters per file unit.
    scale: f64,
    overrides: BTreeMap<String, f64>,
}

fn parse_overrides(set: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = BTreeMap::new();
    for entry in set {
        let (name, value) = entry
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("--set expects NAME=VALUE, got `{entry}`")))?;
        if name.is_empty() {
            return Err(CliError::usage(format!("--set `{entry}` has an empty name")));
        }
        let value: f64 = value
            .parse()
            .map_err(|_| CliError::usage(format!("--set `{entry}`: value is not a number")))?;
        out.insert(name.to_string(), value);
    }
    Ok(out)
}

fn load(path: &Path, set: &[String]) -> Result<Loaded, CliError> {
    let overrides = parse_overrides(set)?;
    let text = std::fs::read_to_string(path)
        .map_err(|err| CliError::data(format!("{}: {err}", path.display())))?;
    let cs = parse_cross_section(&text)?;
    let rg = resolve_geometry(&cs, &overrides)?;
    let params = cs.parameters.with_overrides(&overrides)?;
    let scale = cs.unit.meters_per_unit();
    Ok(Loaded { cs, rg, params, scale, overrides })
}

/// Evaluates a length expression in file units and returns meters.
fn eval_length(expr: &str, loaded: &Loaded, flag: &str) -> Result<f64, CliError> {
    let value = eval_param_expr(expr, &loaded.params)?;
    if !(value.is_finite() && value > 0.0) {
        return Err(CliError::usage(format!(
            "{flag} \"{expr}\" evaluates to {value}; need a positive length"
        )));
    }
    Ok(value * loaded.scale)
}

fn write_output(out: Option<&Path>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|err| CliError::runtime(format!("{}: {err}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn status_echo(status: TerminalStatus) -> &'static str {
    match status {
        TerminalStatus::Converged => "converged",
        TerminalStatus::MaxItersReached => "max_iters_reached",
    }
}

fn trace_text(trace: &ConvergenceTrace) -> String {
    let mut out = String::from("Convergence trace:\n");
    out.push_str(&format!(
        "  {:>4} {:>7} {:>13} {:>10} {:>9}  {}\n",
        "iter", "N", "control", "delta_rel", "seconds", "status"
    ));
    let last = trace.records.len() - 1;
    for (i, r) in trace.records.iter().enumerate() {
        let status = if i < last { "running" } else { status_echo(trace.status) };
        let delta = match r.delta_rel {
            Some(d) => format!("{d:.3e}"),
            None => String::from("-"),
        };
        out.push_str(&format!(
            "  {:>4} {:>7} {:>13.6e} {:>10} {:>9.3}  {}\n",
            r.iteration, r.n, r.control_value, delta, r.seconds, status
        ));
    }
    out
}

fn trace_json(trace: &ConvergenceTrace) -> serde_json::Value {
    let records: Vec<serde_json::Value> = trace
        .records
        .iter()
        .map(|r| {
            serde_json::json!({
                "iteration": r.iteration,
                "N": r.n,
                "control": r.control_value,
                "delta_rel": r.delta_rel,
                "memory_bytes": r.memory_bytes,
                "assemble_s": r.assemble_s,
                "solve_s": r.solve_s,
                "seconds": r.seconds,
            })
        })
        .collect();
    serde_json::Value::Array(records)
}

fn render_solve(
    c: &qcap::CapacitanceMatrix,
    report: &SolveReport,
    trace: Option<&ConvergenceTrace>,
    manifest: &RunManifest,
    format: Format,
) -> Result<String, CliError> {
    match format {
        Format::Text => {
            let mut out = manifest_header(manifest);
            out.push_str(&capacitance_text(c));
            out.push_str(&format!(
                "N = {}  memory_bytes = {}  assemble_s = {:.3}  solve_s = {:.3}\n",
                report.n, report.memory_bytes, report.assemble_s, report.solve_s
            ));
            if let Some(trace) = trace {
                out.push_str(&trace_text(trace));
            }
            Ok(out)
        }
        Format::Csv => {
            let mut out = manifest_header(manifest);
            out.push_str(&capacitance_csv(c));
            if let Some(trace) = trace {
                out.push_str("# convergence trace\n");
                out.push_str(&trace_csv(trace));
            }
            Ok(out)
        }
        Format::Json => {
            let mut value = serde_json::to_value(report)
                .map_err(|err| CliError::runtime(err.to_string()))?;
            let map = value.as_object_mut().expect("report serializes to an object");
            map.insert(
                String::from("manifest"),
                serde_json::to_value(manifest).map_err(|err| CliError::runtime(err.to_string()))?,
            );
            if let Some(trace) = trace {
                map.insert(String::from("trace"), trace_json(trace));
                map.insert(
                    String::from("status"),
                    serde_json::Value::String(String::from(status_echo(trace.status))),
                );
            }
            let body = serde_json::to_string_pretty(&value)
                .map_err(|err| CliError::runtime(err.to_string()))?;
            Ok(body + "\n")
        }
    }
}

fn render_sweep(
    report: &SweepReport,
    manifest: &RunManifest,
    format: Format,
) -> Result<String, CliError> {
    match format {
        Format::Text => Ok(manifest_header(manifest) + &sweep_table(report)),
        Format::Csv => Ok(manifest_header(manifest) + &sweep_csv(report)),
        Format::Json => {
            let rows: Vec<serde_json::Value> = report
                .rows
                .iter()
                .map(|row| match &row.metrics {
                    Some(mx) => serde_json::json!({
                        "m": row.m,
                        "delta_c_pct": mx.delta_c_pct,
                        "n_ratio": mx.n_ratio,
                        "v_ratio": mx.v_ratio,
                        "t_ratio": mx.t_ratio,
                        "n_it": mx.n_it,
                        "n_ref": mx.n_ref,
                        "n_adaptive": mx.n_adaptive,
                        "status": row.status.to_string(),
                    }),
                    None => serde_json::json!({
                        "m": row.m,
                        "status": row.status.to_string(),
                    }),
                })
                .collect();
            let value = serde_json::json!({
                "manifest": serde_json::to_value(manifest)
                    .map_err(|err| CliError::runtime(err.to_string()))?,
                "parameter": report.parameter,
                "rows": rows,
            });
            let body = serde_json::to_string_pretty(&value)
                .map_err(|err| CliError::runtime(err.to_string()))?;
            Ok(body + "\n")
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<i32, CliError> {
    let loaded = load(&args.geometry, &args.set)?;
    let mut config = vec![(String::from("format"), String::from(args.format.name()))];

    let (c, report, trace, code) = if let Some(expr) = &args.uniform {
        config.push((String::from("mode"), String::from("uniform")));
        config.push((String::from("uniform_l"), expr.clone()));
        let l = eval_length(expr, &loaded, "--uniform")?;
        let run = reference_run(&loaded.rg, l)?;
        let report = SolveReport {
            n_cond: run.c.n_cond(),
            c: run.c.to_rows(),
            n: run.n,
            memory_bytes: run.memory_bytes,
            assemble_s: run.assemble_s,
            solve_s: run.solve_s,
        };
        (run.c, report, None, 0)
    } else {
        let expr = args.adapt.initial_l.as_deref().ok_or_else(|| {
            CliError::usage("adaptive solve requires --initial-l (e.g. --initial-l \"2*w\")")
        })?;
        config.push((String::from("mode"), String::from("adaptive")));
        config.extend(adapt_echo(&args.adapt));
        let initial_l_max = eval_length(expr, &loaded, "--initial-l")?;
        let cfg = AdaptiveConfig {
            method: args.adapt.method,
            tol: args.adapt.tol,
            max_iters: args.adapt.max_iters,
            initial_l_max,
            control: args.adapt.control,
        };
        let (c, trace) = run_adaptive(&loaded.rg, &cfg)?;
        let last = trace.final_record();
        let report = SolveReport {
            n_cond: c.n_cond(),
            c: c.to_rows(),
            n: last.n,
            memory_bytes: last.memory_bytes,
            assemble_s: trace.total_assemble_s(),
            solve_s: trace.total_solve_s(),
        };
        let code = match trace.status {
            TerminalStatus::Converged => 0,
            TerminalStatus::MaxItersReached => EXIT_MAX_ITERS,
        };
        (c, report, Some(trace), code)
    };

    let manifest = build_manifest(Some(&args.geometry), Some(&loaded.params), config);
    let body = render_solve(&c, &report, trace.as_ref(), &manifest, args.format)?;
    write_output(args.out.as_deref(), &body)?;
    Ok(code)
}

fn cmd_sweep(args: SweepArgs) -> Result<i32, CliError> {
    let loaded = load(&args.geometry, &args.set)?;
    let initial_l = args
        .adapt
        .initial_l
        .clone()
        .ok_or_else(|| CliError::usage("sweep requires --initial-l (e.g. --initial-l \"2*w\")"))?;
    let percents = args.range.expand(args.skip_zero);
    if percents.is_empty() {
        return Err(CliError::usage("--range selects no points"));
    }

    let spec = SweepSpec {
        parameter: args.param.clone(),
        percents,
        method: args.adapt.method,
        tol: args.adapt.tol,
        max_iters: args.adapt.max_iters,
        control: args.adapt.control,
        initial_l,
        reference_l: args.reference_l.clone(),
    };
    let report = run_sweep(&loaded.cs, &loaded.overrides, &spec)?;

    let mut config = vec![
        (String::from("format"), String::from(args.format.name())),
        (String::from("param"), args.param.clone()),
        (
            String::from("range"),
            format!("{}:{}:{}", args.range.start, args.range.stop, args.range.step),
        ),
        (String::from("skip_zero"), args.skip_zero.to_string()),
        (String::from("reference_l"), args.reference_l.clone()),
    ];
    config.extend(adapt_echo(&args.adapt));
    let manifest = build_manifest(Some(&args.geometry), Some(&loaded.params), config);
    let body = render_sweep(&report, &manifest, args.format)?;
    write_output(args.out.as_deref(), &body)?;
    Ok(if report.all_succeeded() { 0 } else { 1 })
}

fn cmd_mesh(args: MeshArgs) -> Result<i32, CliError> {
    let loaded = load(&args.geometry, &args.set)?;
    let l = eval_length(&args.l, &loaded, "--l")?;
    let mut mesh = build_initial_mesh(&loaded.rg, l)?;
    for _ in 0..args.refine_iters {
        mesh = refine_all(&mesh);
    }
    let config = vec![
        (String::from("l"), args.l.clone()),
        (String::from("refine_iters"), args.refine_iters.to_string()),
    ];
    let manifest = build_manifest(Some(&args.geometry), Some(&loaded.params), config);
    let body = manifest_header(&manifest) + &mesh_csv(&mesh);
    write_output(args.out.as_deref(), &body)?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, CliError> {
    if args.pairs == 0 {
        return Err(CliError::usage("--pairs must be at least 1"));
    }
    let report = run_verification(args.pairs, args.seed)?;
    for check in &report.checks {
        let verdict = if check.passed() { "PASS" } else { "FAIL" };
        println!(
            "{verdict}  {:<44} worst {:>9.3e}  limit {:.1e}",
            check.name, check.worst, check.limit
        );
    }
    Ok(if report.all_passed() { 0 } else { 1 })
}

/// QCAP_THREADS caps the worker count; `--serial` pins it to one thread.
fn init_thread_pool(serial: bool) {
    let threads = if serial {
        Some(1)
    } else {
        std::env::var("QCAP_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n > 0)
    };
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Mesh(args) => cmd_mesh(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    init_thread_pool(cli.serial);
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            std::process::exit(err.code);
        }
    }
}
