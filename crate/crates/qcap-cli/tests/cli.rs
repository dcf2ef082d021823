//! End-to-end checks of the `qcap` binary: exit codes, output shapes, and
//! flag handling.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qcap() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qcap"))
}

fn mtl2() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../geometries/mtl2.json")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is utf-8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is utf-8")
}

/// Report lines minus the `#` manifest comments.
fn data_lines(text: &str) -> Vec<&str> {
    text.lines()
        .filter(|line| !line.starts_with('#') && !line.is_empty())
        .collect()
}

const UNIT_SQUARE: &str = r#"{
    "unit": "m",
    "ground_plane": true,
    "conductors": [{
        "name": "box",
        "loop": [[0, 1], [1, 1], [1, 2], [0, 2]],
        "face_eps_r": [1, 1, 1, 1]
    }]
}"#;

#[test]
fn missing_geometry_file_exits_65() {
    let out = qcap()
        .args(["solve", "definitely-missing.json", "--initial-l", "2*w"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(65));
    assert!(stderr(&out).contains("definitely-missing.json"));
}

#[test]
fn unknown_sweep_parameter_exits_65() {
    let out = qcap()
        .arg("sweep")
        .arg(mtl2())
        .args(["--param", "bogus", "--range", "-5:5:5", "--initial-l", "2*w"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(65));
    assert!(stderr(&out).contains("bogus"));
}

#[test]
fn unknown_flag_exits_64() {
    let out = qcap()
        .args(["solve", "x.json", "--frobnicate"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn adaptive_solve_without_initial_l_exits_64() {
    let out = qcap().arg("solve").arg(mtl2()).output().unwrap();
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("--initial-l"));
}

#[test]
fn malformed_method_percent_exits_64() {
    let out = qcap()
        .arg("solve")
        .arg(mtl2())
        .args(["--initial-l", "2*w", "--method", "top:150"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn malformed_set_override_exits_64() {
    let out = qcap()
        .arg("solve")
        .arg(mtl2())
        .args(["--initial-l", "2*w", "--set", "w:0.06"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(qcap().arg("--help").output().unwrap().status.code(), Some(0));
    assert_eq!(qcap().arg("--version").output().unwrap().status.code(), Some(0));
}

#[test]
fn mesh_dump_of_a_unit_square_has_four_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.json");
    std::fs::write(&path, UNIT_SQUARE).unwrap();
    let out = qcap().arg("mesh").arg(&path).args(["--l", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let rows = data_lines(&text);
    assert_eq!(rows[0], "index,ax,ay,bx,by,kind,cond_id,eps_r_pos,eps_r_neg,length");
    assert_eq!(rows.len(), 1 + 4);
    assert!(rows[1..].iter().all(|row| row.ends_with(",1")));
}

#[test]
fn mesh_refine_iters_doubles_the_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.json");
    std::fs::write(&path, UNIT_SQUARE).unwrap();
    let out = qcap()
        .arg("mesh")
        .arg(&path)
        .args(["--l", "1", "--refine-iters", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(data_lines(&stdout(&out)).len(), 1 + 16);
}

#[test]
fn verify_passes_on_a_correct_build() {
    let out = qcap().args(["verify", "--pairs", "40"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().all(|line| line.starts_with("PASS")));
}

#[test]
fn sweep_skip_zero_emits_ten_rows() {
    let out = qcap()
        .arg("sweep")
        .arg(mtl2())
        .args([
            "--param", "w", "--range", "-5:5:1", "--skip-zero", "--initial-l", "2*w",
            "--format", "csv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let rows = data_lines(&text);
    assert_eq!(rows[0], "m,delta_c_pct,n_ratio,v_ratio,t_ratio,n_it,status");
    assert_eq!(rows.len(), 1 + 10);
    assert!(rows[1..].iter().all(|row| !row.starts_with("0,")));
}

#[test]
fn uniform_solve_reports_the_reference_mesh() {
    let out = qcap()
        .arg("solve")
        .arg(mtl2())
        .args(["--uniform", "t/3", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["N"], 882);
    assert_eq!(v["n_cond"], 2);
    assert_eq!(v["C"].as_array().unwrap().len(), 2);
    assert_eq!(v["manifest"]["version"], env!("CARGO_PKG_VERSION"));
    assert!(v["manifest"]["timestamp"].is_string());
    assert_eq!(v["manifest"]["config"]["mode"], "uniform");
    assert_eq!(v["manifest"]["parameters"]["w"], 0.05);
}

#[test]
fn adaptive_json_report_carries_the_trace() {
    let out = qcap()
        .arg("solve")
        .arg(mtl2())
        .args(["--initial-l", "2*w", "--tol", "5e-2", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "converged");
    let trace = v["trace"].as_array().unwrap();
    assert!(trace.len() >= 2);
    assert!(trace[0]["delta_rel"].is_null());
    assert!(trace[1]["delta_rel"].is_number());
    assert_eq!(v["manifest"]["config"]["mode"], "adaptive");
}

#[test]
fn exhausted_iteration_budget_exits_2() {
    let out = qcap()
        .arg("solve")
        .arg(mtl2())
        .args(["--initial-l", "2*w", "--max-iters", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("max_iters_reached"));
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = qcap()
        .arg("solve")
        .arg(mtl2())
        .args(["--uniform", "2*w", "--format", "csv", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# qcap "));
    assert_eq!(data_lines(&text).len(), 2);
}

#[test]
fn set_override_changes_the_result() {
    let run = |set: Option<&str>| {
        let mut cmd = qcap();
        cmd.arg("solve").arg(mtl2()).args(["--uniform", "2*w", "--format", "json"]);
        if let Some(entry) = set {
            cmd.args(["--set", entry]);
        }
        let out = cmd.output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["C"][0][0].as_f64().unwrap()
    };
    let base = run(None);
    let widened = run(Some("w=0.06"));
    assert!((widened - base).abs() > 1e-14 * base.abs());
}
