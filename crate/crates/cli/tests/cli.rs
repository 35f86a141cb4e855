//! End-to-end tests of the `pairwalk` binary: exit codes, artifact shape,
//! reproducibility, error JSON.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pairwalk"))
}

fn small_spec(dir: &Path, extra: &str) -> std::path::PathBuf {
    let path = dir.join("spec.json");
    let text = format!(
        r#"{{
            "lattice": {{ "n_sites": 64, "interaction": 4.0 }},
            "initial_state": {{ "width": 1.0 }},
            "pulse": {{ "impulse": 1.5707963267948966, "width": 0.5, "center": 2.0 }},
            "integrator": {{ "t_final": 5.0 }}{extra}
        }}"#
    );
    fs::write(&path, text).unwrap();
    path
}

fn run_ok(output: &Output) {
    assert!(
        output.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn run_produces_all_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = small_spec(tmp.path(), "");
    let out = tmp.path().join("out");
    let result = bin().args(["run", spec.to_str().unwrap(), "--out-dir"]).arg(&out).output().unwrap();
    run_ok(&result);

    let series = fs::read_to_string(out.join("series.csv")).unwrap();
    let mut lines = series.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,centroid_1,centroid_2,norm,purity,double_occ,bound_fraction,left_frac,right_frac"
    );
    assert_eq!(lines.count(), 51); // t = 0.0 .. 5.0 at 0.1

    let marginals = fs::read_to_string(out.join("marginals.ndjson")).unwrap();
    for line in marginals.lines() {
        let doc: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(doc["t"].is_number());
        assert_eq!(doc["density"].as_array().unwrap().len(), 64);
    }
    assert_eq!(marginals.lines().count(), 6); // t = 0, 1, ..., 5

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(report["max_norm_drift"].as_f64().unwrap() < 1e-6);
    // resolved config is echoed, defaults included
    assert_eq!(report["config"]["integrator"]["dt"].as_f64().unwrap(), 1e-3);
    assert_eq!(report["config"]["lattice"]["hopping"].as_f64().unwrap(), 1.0);
    assert!(report["engine_version"].is_string());
}

#[test]
fn identical_specs_reproduce_identical_series() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = small_spec(tmp.path(), "");
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    for out in [&out_a, &out_b] {
        let r = bin().args(["run", spec.to_str().unwrap(), "--out-dir"]).arg(out).output().unwrap();
        run_ok(&r);
    }
    assert_eq!(
        fs::read(out_a.join("series.csv")).unwrap(),
        fs::read(out_b.join("series.csv")).unwrap()
    );
    assert_eq!(
        fs::read(out_a.join("marginals.ndjson")).unwrap(),
        fs::read(out_b.join("marginals.ndjson")).unwrap()
    );
}

#[test]
fn malformed_config_exits_2_with_field_json() {
    let tmp = tempfile::tempdir().unwrap();
    // both impulse and amplitude: validation must name the field
    let spec = small_spec(tmp.path(), "");
    let text = fs::read_to_string(&spec).unwrap().replace(
        "\"impulse\": 1.5707963267948966",
        "\"impulse\": 1.0, \"amplitude\": 2.0",
    );
    fs::write(&spec, text).unwrap();
    let result = bin().args(["run", spec.to_str().unwrap()]).output().unwrap();
    assert_eq!(result.status.code(), Some(2));
    let doc: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&result.stdout).trim()).unwrap();
    assert_eq!(doc["field"], "pulse.impulse");
    assert_eq!(doc["exit_code"], 2);
}

#[test]
fn unstable_dt_rejected_with_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = small_spec(tmp.path(), "");
    let result = bin()
        .args(["run", spec.to_str().unwrap(), "--dt", "0.5", "--out-dir"])
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(2));
    let doc: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&result.stdout).trim()).unwrap();
    assert_eq!(doc["field"], "integrator.dt");
}

#[test]
fn zero_impulse_centroid_is_flat() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = small_spec(tmp.path(), "");
    let text = fs::read_to_string(&spec)
        .unwrap()
        .replace("\"impulse\": 1.5707963267948966", "\"impulse\": 0.0");
    fs::write(&spec, text).unwrap();
    let out = tmp.path().join("out");
    let r = bin().args(["run", spec.to_str().unwrap(), "--out-dir"]).arg(&out).output().unwrap();
    run_ok(&r);
    let series = fs::read_to_string(out.join("series.csv")).unwrap();
    for line in series.lines().skip(1) {
        let c1: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((c1 - 32.0).abs() < 1e-6, "centroid drifted: {line}");
    }
}

#[test]
fn single_point_sweep_matches_run_single() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = small_spec(
        tmp.path(),
        r#", "sweep": { "impulse": [1.5707963267948966] }"#,
    );
    let out_sweep = tmp.path().join("sweep");
    let out_run = tmp.path().join("run");
    let r = bin()
        .args(["sweep", spec.to_str().unwrap(), "--threads", "1", "--out-dir"])
        .arg(&out_sweep)
        .output()
        .unwrap();
    run_ok(&r);
    let r = bin().args(["run", spec.to_str().unwrap(), "--out-dir"]).arg(&out_run).output().unwrap();
    run_ok(&r);

    let sweep_csv = fs::read_to_string(out_sweep.join("sweep.csv")).unwrap();
    assert_eq!(sweep_csv.lines().count(), 2);
    assert!(sweep_csv.lines().nth(1).unwrap().ends_with(",ok"));
    // the per-point artifacts equal the single-run artifacts
    assert_eq!(
        fs::read(out_sweep.join("point_0000/series.csv")).unwrap(),
        fs::read(out_run.join("series.csv")).unwrap()
    );
}

#[test]
fn sweep_records_per_point_failures_and_continues() {
    let tmp = tempfile::tempdir().unwrap();
    // second width is invalid at runtime: packet touches the lattice edge
    let spec = small_spec(tmp.path(), r#", "sweep": { "width": [1.0, 30.0] }"#);
    let out = tmp.path().join("out");
    let r = bin()
        .args(["sweep", spec.to_str().unwrap(), "--threads", "1", "--out-dir"])
        .arg(&out)
        .output()
        .unwrap();
    run_ok(&r);
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].ends_with(",ok"));
    assert!(rows[1].contains("error"), "expected failure row, got: {}", rows[1]);
}

#[test]
fn preset_names_resolve_without_files() {
    // validate-only path: malformed override shows the preset was loaded
    let r = bin().args(["run", "fig1", "--dt", "99.0"]).output().unwrap();
    assert_eq!(r.status.code(), Some(2));
    let doc: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&r.stdout).trim()).unwrap();
    assert_eq!(doc["field"], "integrator.dt");
}

#[test]
fn missing_spec_file_is_a_config_error() {
    let r = bin().args(["run", "/nonexistent/spec.json"]).output().unwrap();
    assert_eq!(r.status.code(), Some(2));
}
