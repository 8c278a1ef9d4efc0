use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_willmore-lab")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json report on stdout")
}

#[test]
fn analyze_clifford_passes_with_json_report() {
    let o = run(&["analyze", "--surface", "clifford-torus", "--chart", "48,48,0,6.283185307179586,0,6.283185307179586,periodic"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    let w = r["invariants"]["willmore_energy"].as_f64().unwrap();
    let exact = 2.0 * std::f64::consts::PI.powi(2);
    assert!((w - exact).abs() / exact < 5e-3, "{w}");
}

#[test]
fn analyze_torus_of_revolution_fails_the_willmore_check() {
    let o = run(&["analyze", "--surface", "torus-of-revolution:3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL"));
}

#[test]
fn reconstruct_round_sphere_is_an_error() {
    let o = run(&["reconstruct", "--surface", "round-sphere"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn reconstruct_reports_no_surface_for_synthetic_frames() {
    for name in ["synthetic-reduced", "synthetic-rank2"] {
        let o = run(&["reconstruct", "--surface", name]);
        assert_eq!(code(&o), 0, "{name}");
        let r = report(&o);
        assert!(r["verdict"].as_str().unwrap().contains("no Willmore surface"), "{name}: {}", r["verdict"]);
    }
}

#[test]
fn verify_harmonic_honors_lambda_samples_and_refine() {
    let o = run(&["verify-harmonic", "--surface", "enneper", "--lambda-samples", "3", "--refine", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    let flat = r["residuals"].as_array().unwrap().iter().filter(|c| c["name"].as_str().unwrap().starts_with("flatness")).count();
    assert!(flat >= 3, "{flat}");
}

#[test]
fn bad_arguments_are_errors() {
    assert_eq!(code(&run(&["analyze"])), 3);
    assert_eq!(code(&run(&["analyze", "--surface", "klein-bottle"])), 3);
    assert_eq!(code(&run(&["analyze", "--surface", "enneper", "--tol", "-1"])), 3);
    assert_eq!(code(&run(&["analyze", "--input", "/nonexistent.csv"])), 3);
}

fn dump_and_reload(dir: &Path) {
    let field = dir.join("veronese.csv");
    let o = run(&["analyze", "--surface", "veronese", "--chart", "64,64,-1,1,-1,1,open", "--format", "csv", "--out", field.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let recovered = dir.join("recovered.csv");
    let o = run(&[
        "reconstruct",
        "--input",
        field.to_str().unwrap(),
        "--chart",
        "64,64,-1,1,-1,1,open",
        "--format",
        "csv",
        "--out",
        recovered.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(recovered).unwrap();
    assert!(text.starts_with("u,v,X0"));
    assert_eq!(text.lines().count(), 1 + 64 * 64);
}

#[test]
fn csv_field_round_trips_through_reconstruct() {
    let dir = tempfile::tempdir().unwrap();
    dump_and_reload(dir.path());
}

#[test]
fn config_file_supplies_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"surface": "klein-bottle", "tol": 500.0, "chart": "32,32,-1,1,-1,1,open"}"#).unwrap();
    assert_eq!(code(&run(&["analyze", "--config", cfg.to_str().unwrap()])), 3);
    let o = run(&["analyze", "--config", cfg.to_str().unwrap(), "--surface", "enneper"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&o)["config"]["tol"].as_f64(), Some(500.0));
}
