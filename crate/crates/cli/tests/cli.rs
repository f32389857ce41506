use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn loowit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loowit")).args(args).output().expect("spawn loowit")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn gen(dir: &Path, name: &str, extra: &[&str]) -> String {
    let path = dir.join(format!("{name}.json")).to_string_lossy().into_owned();
    let mut args = vec!["gen", name, "--out", &path];
    args.extend_from_slice(extra);
    let out = loowit(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn analyze_json(state: &str) -> serde_json::Value {
    let out = loowit(&["analyze", "--state", state, "--json"]);
    assert!(out.status.success());
    serde_json::from_str(&stdout(&out)).unwrap()
}

fn verdict(report: &serde_json::Value, name: &str) -> (bool, f64) {
    let v = report["verdicts"].as_array().unwrap().iter().find(|v| v["criterion"] == name).unwrap();
    (v["detected"].as_bool().unwrap(), v["score"].as_f64().unwrap())
}

#[test]
fn gen_bell_writes_a_projector() {
    let out = loowit(&["gen", "bell"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["dims"], serde_json::json!([2, 2]));
    assert_eq!(json["matrix"].as_array().unwrap().len(), 4);
}

#[test]
fn gen_output_round_trips_through_analyze() {
    let dir = TempDir::new().unwrap();
    let upb = gen(dir.path(), "upb", &[]);
    let noisy = gen(dir.path(), "upb_noise", &["--p", "0.9"]);
    let report = analyze_json(&upb);
    assert_eq!(report["dims"], serde_json::json!([3, 3]));
    let b = report["concurrence_bounds"]["bound_lmax"].as_f64().unwrap();
    assert!((b - 0.055).abs() < 1e-3);
    assert_eq!(report["concurrence_bounds"]["bound_ppt"].as_f64(), Some(0.0));
    assert!(!verdict(&report, "ppt").0);
    assert!(verdict(&report, "realign").0 && verdict(&report, "nonlinear_opt").0);
    assert!(verdict(&analyze_json(&noisy), "nonlinear_opt").0);
}

#[test]
fn analyze_bell_and_product() {
    let dir = TempDir::new().unwrap();
    let bell = analyze_json(&gen(dir.path(), "bell", &[]));
    let (detected, score) = verdict(&bell, "nonlinear_opt");
    assert!(detected && (score - 1.0).abs() < 1e-9);
    let product = analyze_json(&gen(dir.path(), "product", &[]));
    for v in product["verdicts"].as_array().unwrap() {
        assert_eq!(v["detected"], false, "{v}");
    }
}

#[test]
fn analyze_text_report_and_emitted_bases() {
    let dir = TempDir::new().unwrap();
    let bell = gen(dir.path(), "bell", &[]);
    let report = dir.path().join("report.json");
    let out = loowit(&["analyze", "--state", &bell, "--emit-bases", "--out", report.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("nonlinear_opt") && text.contains("L_max"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["optimal_bases"]["basis_a"]["observables"].as_array().unwrap().len(), 4);
}

#[test]
fn invalid_state_exits_with_status_one() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"dims":[1,2],"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#).unwrap();
    let out = loowit(&["analyze", "--state", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace"));

    let out = loowit(&["gen", "no_such_state"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn scan_writes_csv_and_threshold() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("scan.csv");
    let out = loowit(&[
        "scan", "--family", "upb_noise", "--criterion", "nonlinear_opt", "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let summary = stdout(&out);
    assert!(summary.contains("threshold 0.882"), "{summary}");
    let body = std::fs::read_to_string(&csv).unwrap();
    assert!(body.starts_with("p,score,detected\n"));
    assert_eq!(body.lines().count(), 102);
}

#[test]
fn scan_defaults_to_the_negated_pauli_pair_for_the_singlet() {
    let out = loowit(&["scan", "--family", "noisy_singlet", "--criterion", "linear_fixed"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("threshold 0.400"));
}

#[test]
fn scan_of_a_custom_mixture() {
    let dir = TempDir::new().unwrap();
    let target = gen(dir.path(), "maximally_entangled", &["--dim", "3"]);
    let out = loowit(&["scan", "--family", "mixture", "--state", &target, "--criterion", "ppt"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("threshold 0.25"));
}

#[test]
fn scan_without_threshold_exits_with_status_two() {
    let out = loowit(&["scan", "--family", "upb_noise", "--criterion", "ppt", "--step", "0.05"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no threshold in range"));
}

#[test]
fn oracle_is_deterministic_and_never_beaten() {
    let dir = TempDir::new().unwrap();
    for name in ["bell", "upb"] {
        let state = gen(dir.path(), name, &[]);
        let args = ["oracle", "--state", state.as_str(), "--samples", "1000", "--seed", "17"];
        let (a, b) = (loowit(&args), loowit(&args));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
        assert!(stdout(&a).contains("closed form never beaten: yes"));
    }
}
