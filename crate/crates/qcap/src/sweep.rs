//! Multivariant analysis: perturb one named parameter over a percentage
//! range, rerun the adaptive solver per point, and report accuracy and cost
//! ratios against a dense uniform reference mesh rebuilt on the same
//! perturbed geometry.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use crate::adaptive::{
    control_scalar, run_adaptive, AdaptiveConfig, ControlQuantity, RefinementMethod,
    TerminalStatus,
};
use crate::error::{Error, Result};
use crate::expr::eval_param_expr;
use crate::geometry::{resolve_geometry, CrossSection, ResolvedGeometry};
use crate::mesh::build_initial_mesh;
use crate::system::{
    assemble_system, extract_capacitance, factor_solve, memory_estimate_bytes, CapacitanceMatrix,
};

/// One uniform-mesh solve, used both as the sweep reference and for the
/// non-adaptive CLI path.
#[derive(Clone, Debug)]
pub struct ReferenceRun {
    pub c: CapacitanceMatrix,
    pub n: usize,
    pub memory_bytes: u64,
    pub assemble_s: f64,
    pub solve_s: f64,
    pub seconds: f64,
}

pub fn reference_run(rg: &ResolvedGeometry, l_max: f64) -> Result<ReferenceRun> {
    let mesh = build_initial_mesh(rg, l_max)?;
    let t_total = Instant::now();
    let t_assemble = Instant::now();
    let sys = assemble_system(&mesh, rg.ground_plane)?;
    let assemble_s = t_assemble.elapsed().as_secs_f64();
    let t_solve = Instant::now();
    let solution = factor_solve(sys)?;
    let solve_s = t_solve.elapsed().as_secs_f64();
    let c = extract_capacitance(&solution, &mesh);
    Ok(ReferenceRun {
        c,
        n: mesh.n(),
        memory_bytes: memory_estimate_bytes(mesh.n(), mesh.n_cond),
        assemble_s,
        solve_s,
        seconds: t_total.elapsed().as_secs_f64(),
    })
}

/// Sweep definition. The two mesh-length fields are expressions over the
/// geometry parameters in file units, re-evaluated at every sweep point so
/// they track the perturbed parameter (e.g. an initial length of "2*w" while
/// sweeping w).
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub parameter: String,
    pub percents: Vec<f64>,
    pub method: RefinementMethod,
    pub tol: f64,
    pub max_iters: usize,
    pub control: ControlQuantity,
    pub initial_l: String,
    pub reference_l: String,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepMetrics {
    /// |control(adaptive) - control(reference)| / |control(reference)|, in %.
    pub delta_c_pct: f64,
    pub n_ratio: f64,
    pub v_ratio: f64,
    pub t_ratio: f64,
    /// Solves performed by the adaptive run (initial solve included).
    pub n_it: usize,
    pub n_ref: usize,
    pub n_adaptive: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RowStatus {
    Converged,
    MaxItersReached,
    Failed(String),
}

impl std::fmt::Display for RowStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RowStatus::Converged => f.write_str("converged"),
            RowStatus::MaxItersReached => f.write_str("max_iters_reached"),
            RowStatus::Failed(msg) => write!(f, "failed: {msg}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub m: f64,
    pub metrics: Option<SweepMetrics>,
    pub status: RowStatus,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub parameter: String,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn all_succeeded(&self) -> bool {
        self.rows.iter().all(|r| !matches!(r.status, RowStatus::Failed(_)))
    }
}

fn run_point(
    cs: &CrossSection,
    overrides: &BTreeMap<String, f64>,
    spec: &SweepSpec,
    nominal: f64,
    m: f64,
) -> Result<(SweepMetrics, TerminalStatus)> {
    let mut point_overrides = overrides.clone();
    point_overrides.insert(spec.parameter.clone(), nominal * (1.0 + m / 100.0));
    let rg = resolve_geometry(cs, &point_overrides)?;
    let params = cs.parameters.with_overrides(&point_overrides)?;
    let scale = cs.unit.meters_per_unit();
    let initial_l = eval_param_expr(&spec.initial_l, &params)? * scale;
    let reference_l = eval_param_expr(&spec.reference_l, &params)? * scale;
    if !(reference_l > 0.0) || !reference_l.is_finite() {
        return Err(Error::Config(format!(
            "reference element length must be positive and finite, got {reference_l}"
        )));
    }

    let reference = reference_run(&rg, reference_l)?;
    let cfg = AdaptiveConfig {
        method: spec.method,
        tol: spec.tol,
        max_iters: spec.max_iters,
        initial_l_max: initial_l,
        control: spec.control,
    };
    let (c_adaptive, trace) = run_adaptive(&rg, &cfg)?;

    let c_ref = control_scalar(&reference.c, spec.control)?;
    let c_ad = control_scalar(&c_adaptive, spec.control)?;
    if c_ref == 0.0 {
        return Err(Error::DegenerateControl);
    }
    let last = trace.final_record();
    let metrics = SweepMetrics {
        delta_c_pct: (c_ad - c_ref).abs() / c_ref.abs() * 100.0,
        n_ratio: reference.n as f64 / last.n as f64,
        v_ratio: reference.memory_bytes as f64 / last.memory_bytes as f64,
        t_ratio: reference.seconds / trace.total_seconds(),
        n_it: trace.iterations(),
        n_ref: reference.n,
        n_adaptive: last.n,
    };
    Ok((metrics, trace.status))
}

/// Runs every sweep point (in parallel when the thread pool allows) and
/// collects rows in the order of `spec.percents`. A failing point becomes a
/// `Failed` row; the remaining points still run. Per-point timings are
/// wall-clock and can be inflated by sibling points running concurrently;
/// use a single-threaded pool for timing studies.
pub fn run_sweep(
    cs: &CrossSection,
    overrides: &BTreeMap<String, f64>,
    spec: &SweepSpec,
) -> Result<SweepReport> {
    let params = cs.parameters.with_overrides(overrides)?;
    let nominal = params
        .get(&spec.parameter)
        .ok_or_else(|| Error::UnknownParameter(spec.parameter.clone()))?;

    let rows: Vec<SweepRow> = spec
        .percents
        .par_iter()
        .map(|&m| match run_point(cs, overrides, spec, nominal, m) {
            Ok((metrics, TerminalStatus::Converged)) => {
                SweepRow { m, metrics: Some(metrics), status: RowStatus::Converged }
            }
            Ok((metrics, TerminalStatus::MaxItersReached)) => {
                SweepRow { m, metrics: Some(metrics), status: RowStatus::MaxItersReached }
            }
            Err(err) => SweepRow { m, metrics: None, status: RowStatus::Failed(err.to_string()) },
        })
        .collect();
    Ok(SweepReport { parameter: spec.parameter.clone(), rows })
}
