//! Text renderers for the machine-readable outputs: capacitance CSV/text,
//! convergence-trace CSV, sweep CSV and aligned table, mesh dump CSV, and
//! the JSON solve report body.

use serde::Serialize;

use crate::adaptive::{ConvergenceTrace, TerminalStatus};
use crate::geometry::SegmentKind;
use crate::mesh::Mesh;
use crate::sweep::SweepReport;
use crate::system::CapacitanceMatrix;

/// Quotes a CSV field when it contains a delimiter, quote, or newline.
fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// One line per conductor, entries in F/m.
pub fn capacitance_csv(c: &CapacitanceMatrix) -> String {
    let mut out = String::new();
    for row in c.rows() {
        let line: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Human-readable capacitance matrix in scientific notation.
pub fn capacitance_text(c: &CapacitanceMatrix) -> String {
    let mut out = String::from("Capacitance matrix (F/m):\n");
    for (i, row) in c.rows().enumerate() {
        out.push_str(&format!("  C[{i}]"));
        for v in row {
            out.push_str(&format!("  {v:>13.6e}"));
        }
        out.push('\n');
    }
    out
}

fn trace_status(trace: &ConvergenceTrace, index: usize) -> &'static str {
    if index + 1 < trace.records.len() {
        return "running";
    }
    match trace.status {
        TerminalStatus::Converged => "converged",
        TerminalStatus::MaxItersReached => "max_iters_reached",
    }
}

/// Per-iteration convergence log.
pub fn trace_csv(trace: &ConvergenceTrace) -> String {
    let mut out = String::from("iter,N,control,delta_rel,mem_bytes,seconds,status\n");
    for (i, r) in trace.records.iter().enumerate() {
        let delta = r.delta_rel.map(|d| d.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.iteration,
            r.n,
            r.control_value,
            delta,
            r.memory_bytes,
            r.seconds,
            trace_status(trace, i)
        ));
    }
    out
}

/// Sweep rows; failed points leave the metric fields empty.
pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = String::from("m,delta_c_pct,n_ratio,v_ratio,t_ratio,n_it,status\n");
    for row in &report.rows {
        match &row.metrics {
            Some(metrics) => out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.m,
                metrics.delta_c_pct,
                metrics.n_ratio,
                metrics.v_ratio,
                metrics.t_ratio,
                metrics.n_it,
                csv_field(&row.status.to_string())
            )),
            None => out.push_str(&format!(
                "{},,,,,,{}\n",
                row.m,
                csv_field(&row.status.to_string())
            )),
        }
    }
    out
}

/// Aligned table with the same content as [`sweep_csv`].
pub fn sweep_table(report: &SweepReport) -> String {
    let header =
        ["m, %", "dC, %", "N_ref/N", "V_ref/V", "T_ref/T", "N_it", "status"];
    let mut cells: Vec<[String; 7]> = Vec::with_capacity(report.rows.len());
    for row in &report.rows {
        cells.push(match &row.metrics {
            Some(m) => [
                format!("{:+}", row.m),
                format!("{:.4}", m.delta_c_pct),
                format!("{:.3}", m.n_ratio),
                format!("{:.3}", m.v_ratio),
                format!("{:.3}", m.t_ratio),
                m.n_it.to_string(),
                row.status.to_string(),
            ],
            None => [
                format!("{:+}", row.m),
                "-".into(),
                "-".into(),
                "-".into(),
                "-".into(),
                "-".into(),
                row.status.to_string(),
            ],
        });
    }
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &cells {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = format!("Sweep of parameter '{}':\n", report.parameter);
    let fmt_row = |fields: &[String], widths: &[usize]| -> String {
        let joined: Vec<String> = fields
            .iter()
            .zip(widths)
            .map(|(f, w)| format!("{f:>width$}", width = *w))
            .collect();
        format!("  {}\n", joined.join("  "))
    };
    let header_owned: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    out.push_str(&fmt_row(&header_owned, &widths));
    for row in &cells {
        out.push_str(&fmt_row(row, &widths));
    }
    out
}

/// Element dump: endpoints, classification, and length per line.
pub fn mesh_csv(mesh: &Mesh) -> String {
    let mut out =
        String::from("index,ax,ay,bx,by,kind,cond_id,eps_r_pos,eps_r_neg,length\n");
    for (i, e) in mesh.elements.iter().enumerate() {
        let (kind, cond_id, eps_pos, eps_neg) = match e.kind {
            SegmentKind::ConductorFace { conductor, eps_r } => {
                ("conductor", conductor.to_string(), eps_r.to_string(), String::new())
            }
            SegmentKind::DielectricInterface { eps_pos, eps_neg } => {
                ("dielectric", String::new(), eps_pos.to_string(), eps_neg.to_string())
            }
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            i, e.a.x, e.a.y, e.b.x, e.b.y, kind, cond_id, eps_pos, eps_neg, e.length
        ));
    }
    out
}

/// JSON body of a solve run; the CLI nests it next to its run manifest.
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub n_cond: usize,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    #[serde(rename = "N")]
    pub n: usize,
    pub memory_bytes: u64,
    pub assemble_s: f64,
    pub solve_s: f64,
}
