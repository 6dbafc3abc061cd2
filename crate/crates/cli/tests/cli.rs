use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ou-spectra"));
    c.env_remove("OU_SPECTRA_TOL_PROFILE");
    c
}

fn model(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn all_numbers_finite(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.as_f64().is_some_and(f64::is_finite),
        Value::Array(a) => a.iter().all(all_numbers_finite),
        Value::Object(o) => o.values().all(all_numbers_finite),
        _ => true,
    }
}

#[test]
fn analyze_classical_writes_report_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let o = run(&["analyze", model("classical_1d.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read_json(&out);
    assert_eq!(r["schema"], 1);
    assert!(all_numbers_finite(&r));
    assert_eq!(r["gramian"]["spectral_abscissa"].as_f64().unwrap(), -1.0);
    assert!((r["gramian"]["q_inf"][0][0].as_f64().unwrap() - 0.5).abs() < 1e-14);
    let csv = std::fs::read_to_string(dir.path().join("c.contractivity.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,smu_norm,K"));
    assert_eq!(lines.count(), 50);
    assert_eq!(r["contractivity"]["csv"], "c.contractivity.csv");
}

#[test]
fn analyze_jordan_matches_closed_form_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("j.json");
    let o = run(&["analyze", model("jordan_omega1.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read_json(&out);
    for p in r["contractivity"]["points"].as_array().unwrap() {
        let t = p["t"].as_f64().unwrap();
        let expect = (-t).exp() * (t + (t * t + 1.0).sqrt());
        assert!((p["smu_norm"].as_f64().unwrap() - expect).abs() <= 1e-8);
    }
    assert!(r["contractivity"]["closed_form_error"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn analyze_is_bit_for_bit_deterministic() {
    let (da, db) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&da, &db] {
        let out = d.path().join("r.json");
        let o = run(&["analyze", model("hypoelliptic_2d.json").to_str().unwrap(), "--t-grid", "0.25:3:0.25", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    for f in ["r.json", "r.contractivity.csv"] {
        assert_eq!(std::fs::read(da.path().join(f)).unwrap(), std::fs::read(db.path().join(f)).unwrap());
    }
    let stdout_a = run(&["analyze", model("hypoelliptic_2d.json").to_str().unwrap()]).stdout;
    let stdout_b = run(&["analyze", model("hypoelliptic_2d.json").to_str().unwrap()]).stdout;
    assert_eq!(stdout_a, stdout_b);
    assert_eq!(serde_json::from_slice::<Value>(&stdout_a).unwrap()["schema"], 1);
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["analyze", "/nonexistent/model.json"])), 1);
    let bad = write(dir.path(), "bad.json", r#"{"A": [[-1, 0], [0, -1]], "Q": [[0, 1], [0, 0]]}"#);
    let o = run(&["analyze", &bad]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("symmetric"));
    assert_eq!(code(&run(&["analyze", model("classical_1d.json").to_str().unwrap(), "--t-grid", "1:0:1"])), 1);
    assert_eq!(code(&run(&["spectrum", model("classical_1d.json").to_str().unwrap(), "--re-min", "2"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["verify"])), 1);
}

#[test]
fn unknown_tolerance_profile_is_an_input_error() {
    let o = bin().env("OU_SPECTRA_TOL_PROFILE", "sloppy").args(["analyze", model("classical_1d.json").to_str().unwrap()]).output().unwrap();
    assert_eq!(code(&o), 1);
    let o = bin().env("OU_SPECTRA_TOL_PROFILE", "strict").args(["analyze", model("classical_1d.json").to_str().unwrap()]).output().unwrap();
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["tolerances"]["rank_tol"].as_f64().unwrap(), 1e-12);
}

#[test]
fn spectrum_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = run(&["spectrum", model("classical_1d.json").to_str().unwrap(), "--degree", "3", "--re-min", "-3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read_json(&out);
    assert!(all_numbers_finite(&r));
    let re = |key: &str| -> Vec<f64> { r[key]["points"].as_array().unwrap().iter().map(|p| p["re"].as_f64().unwrap()).collect() };
    for key in ["predicted", "galerkin"] {
        let pts = re(key);
        assert_eq!(pts.len(), 4);
        for (p, e) in pts.iter().zip([-3.0, -2.0, -1.0, 0.0]) {
            assert!((p - e).abs() < 1e-9);
        }
    }
    assert_eq!(r["match"]["pass"], true);
    assert!(dir.path().join("s.predicted.csv").exists() && dir.path().join("s.galerkin.csv").exists());

    let o = run(&["spectrum", model("jordan_omega1.json").to_str().unwrap(), "--degree", "2"]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["galerkin"]["points"].as_array().unwrap().len(), 3);
}

#[test]
fn failed_hypotheses_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let rot = write(dir.path(), "rot.json", r#"{"A": [[0, -1], [1, 0]], "Q": [[1, 0], [0, 1]]}"#);
    let o = run(&["spectrum", &rot]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("Unstable"));
    assert_eq!(code(&run(&["analyze", &rot])), 2);
    let o = run(&["spectrum", model("degenerate_2d.json").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("DegenerateMeasure"));
}

#[test]
fn verify_passes_on_random_and_bundled_models() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let o = run(&["verify", "--random", "42", "10", "--degree", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = read_json(&out);
    assert_eq!(r["suites"].as_array().unwrap().len(), 10);
    assert_eq!(r["untested_theory"].as_array().unwrap().len(), 3);
    for m in ["classical_1d.json", "jordan_omega1.json", "hypoelliptic_2d.json", "degenerate_2d.json"] {
        let o = run(&["verify", model(m).to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{m}: {}", stderr(&o));
    }
    let o = run(&["verify", model("jordan_omega1.json").to_str().unwrap()]);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = r["suites"][0]["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"example_norm_curve"));
}

#[test]
fn corrupted_q_inf_exits_three_with_residuals() {
    let o = run(&["verify", model("jordan_omega1.json").to_str().unwrap(), "--corrupt-qinf", "1e-4"]);
    assert_eq!(code(&o), 3);
    let err = stderr(&o);
    assert!(err.contains("lyapunov_residual") && err.contains("residual"));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["pass"], false);
}

#[test]
fn fock_examples() {
    let dir = tempfile::tempdir().unwrap();
    let scalar = write(dir.path(), "t1.json", r#"{"T": [[0.5]]}"#);
    let out = dir.path().join("f.json");
    let o = run(&["fock", "--matrix", &scalar, "--levels", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read_json(&out);
    let pts: Vec<f64> = r["symmetric"]["points"].as_array().unwrap().iter().map(|p| p["re"].as_f64().unwrap()).collect();
    assert_eq!(pts, vec![0.25, 0.5, 1.0]);
    assert_eq!(r["hausdorff"]["symmetric_vs_predicted"].as_f64().unwrap(), 0.0);
    for tag in ["symmetric", "full", "predicted"] {
        assert!(dir.path().join(format!("f.{tag}.csv")).exists());
    }

    let diag = write(dir.path(), "t2.json", "[[0.5, 0], [0, 0.3333333333333333]]");
    let o = run(&["fock", "--matrix", &diag, "--levels", "2"]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let mut pts: Vec<f64> = r["symmetric"]["points"].as_array().unwrap().iter().map(|p| p["re"].as_f64().unwrap()).collect();
    pts.sort_by(f64::total_cmp);
    for (p, e) in pts.iter().zip([1.0 / 9.0, 1.0 / 6.0, 0.25, 1.0 / 3.0, 0.5, 1.0]) {
        assert!((p - e).abs() < 1e-14);
    }

    let big = write(dir.path(), "big.json", "[[1.1]]");
    let o = run(&["fock", "--matrix", &big]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("NotContraction"));
    assert_eq!(code(&run(&["fock", "--matrix", &big, "--allow-noncontraction", "--levels", "2"])), 0);
}
