//! Iterative mesh refinement driven by the relative change of a scalar
//! control quantity derived from the capacitance matrix.
//!
//! Iteration 0 solves on the initial mesh; every following iteration refines
//! (all elements, or the top fraction ranked by charge magnitude), re-solves,
//! and stops once the control quantity moves by at most `tol` relative.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::ResolvedGeometry;
use crate::linalg::Mat;
use crate::mesh::{build_initial_mesh, refine_all, refine_top_fraction, Mesh};
use crate::system::{
    assemble_system, extract_capacitance, factor_solve, memory_estimate_bytes, CapacitanceMatrix,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RefinementMethod {
    /// Bisect every element each iteration; N doubles.
    All,
    /// Bisect the stated percentage of elements, ranked by the largest
    /// charge-density magnitude from the previous solution. 100 behaves
    /// exactly like [`RefinementMethod::All`].
    TopPercent(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ControlQuantity {
    /// Track one diagonal entry C_kk.
    DiagonalElement(usize),
    /// Track the Frobenius norm of the whole matrix.
    FrobeniusNorm,
}

#[derive(Clone, Copy, Debug)]
pub struct AdaptiveConfig {
    pub method: RefinementMethod,
    /// Relative-change convergence threshold.
    pub tol: f64,
    /// Refinement iterations allowed after iteration 0.
    pub max_iters: usize,
    /// Element length bound for the initial mesh, meters.
    pub initial_l_max: f64,
    pub control: ControlQuantity,
}

impl AdaptiveConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters < 1 {
            return Err(Error::Config("max-iters must be at least 1".into()));
        }
        if !(self.initial_l_max > 0.0) || !self.initial_l_max.is_finite() {
            return Err(Error::Config(format!(
                "initial element length must be positive and finite, got {}",
                self.initial_l_max
            )));
        }
        if let RefinementMethod::TopPercent(p) = self.method {
            if !(p > 0.0 && p <= 100.0) {
                return Err(Error::Config(format!(
                    "refinement percentage must be in (0, 100], got {p}"
                )));
            }
        }
        Ok(())
    }
}

/// One solve of the refinement loop. `seconds` spans assembly, solve and
/// extraction; the two named stages are also reported separately.
#[derive(Clone, Copy, Debug)]
pub struct IterationRecord {
    pub iteration: usize,
    pub n: usize,
    pub control_value: f64,
    /// |C_i - C_{i-1}| / |C_{i-1}|; absent at iteration 0.
    pub delta_rel: Option<f64>,
    pub memory_bytes: u64,
    pub assemble_s: f64,
    pub solve_s: f64,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TerminalStatus {
    Converged,
    MaxItersReached,
}

#[derive(Clone, Debug)]
pub struct ConvergenceTrace {
    pub records: Vec<IterationRecord>,
    pub status: TerminalStatus,
}

impl ConvergenceTrace {
    /// Number of solves performed (iteration 0 included).
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn total_seconds(&self) -> f64 {
        self.records.iter().map(|r| r.seconds).sum()
    }

    pub fn total_assemble_s(&self) -> f64 {
        self.records.iter().map(|r| r.assemble_s).sum()
    }

    pub fn total_solve_s(&self) -> f64 {
        self.records.iter().map(|r| r.solve_s).sum()
    }

    pub fn final_record(&self) -> &IterationRecord {
        self.records.last().expect("trace always holds iteration 0")
    }
}

/// The scalar the stopping rule watches.
pub fn control_scalar(c: &CapacitanceMatrix, control: ControlQuantity) -> Result<f64> {
    match control {
        ControlQuantity::DiagonalElement(k) => {
            if k >= c.n_cond() {
                return Err(Error::ConductorIndex { index: k, n_cond: c.n_cond() });
            }
            Ok(c.at(k, k))
        }
        ControlQuantity::FrobeniusNorm => Ok(c.frobenius_norm()),
    }
}

/// Per-element refinement score: largest |sigma| across excitation columns.
fn charge_scores(sigma: &Mat) -> Vec<f64> {
    (0..sigma.rows())
        .map(|r| sigma.row(r).iter().fold(0.0f64, |m, x| m.max(x.abs())))
        .collect()
}

struct SolveOutcome {
    c: CapacitanceMatrix,
    sigma: Mat,
    record: IterationRecord,
}

fn solve_iteration(mesh: &Mesh, grounded: bool, iteration: usize) -> Result<SolveOutcome> {
    let t_total = Instant::now();
    let t_assemble = Instant::now();
    let sys = assemble_system(mesh, grounded)?;
    let assemble_s = t_assemble.elapsed().as_secs_f64();
    let t_solve = Instant::now();
    let solution = factor_solve(sys)?;
    let solve_s = t_solve.elapsed().as_secs_f64();
    let c = extract_capacitance(&solution, mesh);
    let record = IterationRecord {
        iteration,
        n: mesh.n(),
        control_value: f64::NAN,
        delta_rel: None,
        memory_bytes: memory_estimate_bytes(mesh.n(), mesh.n_cond),
        assemble_s,
        solve_s,
        seconds: t_total.elapsed().as_secs_f64(),
    };
    Ok(SolveOutcome { c, sigma: solution.sigma, record })
}

/// Runs the refinement loop and returns the last capacitance matrix with the
/// full per-iteration trace.
pub fn run_adaptive(
    rg: &ResolvedGeometry,
    cfg: &AdaptiveConfig,
) -> Result<(CapacitanceMatrix, ConvergenceTrace)> {
    cfg.validate()?;
    let mut mesh = build_initial_mesh(rg, cfg.initial_l_max)?;
    let mut outcome = solve_iteration(&mesh, rg.ground_plane, 0)?;
    let mut prev_control = control_scalar(&outcome.c, cfg.control)?;
    outcome.record.control_value = prev_control;
    let mut records = vec![outcome.record];

    for iteration in 1..=cfg.max_iters {
        mesh = match cfg.method {
            RefinementMethod::All => refine_all(&mesh),
            RefinementMethod::TopPercent(p) => {
                refine_top_fraction(&mesh, &charge_scores(&outcome.sigma), p)?
            }
        };
        outcome = solve_iteration(&mesh, rg.ground_plane, iteration)?;
        let control = control_scalar(&outcome.c, cfg.control)?;
        if prev_control == 0.0 {
            return Err(Error::DegenerateControl);
        }
        let delta = (control - prev_control).abs() / prev_control.abs();
        outcome.record.control_value = control;
        outcome.record.delta_rel = Some(delta);
        records.push(outcome.record);
        if delta <= cfg.tol {
            return Ok((outcome.c, ConvergenceTrace { records, status: TerminalStatus::Converged }));
        }
        prev_control = control;
    }
    Ok((outcome.c, ConvergenceTrace { records, status: TerminalStatus::MaxItersReached }))
}
