use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_so3-energy");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn table_of_zeros_sizes() {
    let out = run(&["table", "--ensemble", "zeros", "--rmax", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let n: Vec<usize> = stdout(&out).lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(n, vec![2, 3, 4, 5, 12, 14, 16, 18]);
}

#[test]
fn constants_json() {
    let out = run(&["constants", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let kappa = v.as_array().unwrap().iter().find(|e| e["name"] == "kappa").unwrap();
    assert!((kappa["value"].as_f64().unwrap() + 0.846_573_590_3).abs() < 1e-10);
    for e in v.as_array().unwrap() {
        assert!(e["method"].is_string() && e["tolerance"].is_number());
    }
}

#[test]
fn generate_then_energy_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["json", "csv"] {
        let path = dir.path().join(format!("c.{format}"));
        let p = path.to_str().unwrap();
        let gen = run(&["generate", "--ensemble", "spherical", "--r", "20", "--s", "3", "--seed", "9", "--out", p, "--format", format]);
        assert_eq!(gen.status.code(), Some(0), "{}", String::from_utf8_lossy(&gen.stderr));
        let energy = run(&["energy", "--in", p]);
        assert_eq!(energy.status.code(), Some(0));
        assert_eq!(stdout(&gen), stdout(&energy));
    }
}

#[test]
fn predict_decomposition() {
    let out = run(&["predict", "--ensemble", "uniform", "--r", "5", "--s", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["n"], 10);
    let parts = v["kappa_n2"].as_f64().unwrap() + v["log_term"].as_f64().unwrap() + 10.0 * v["residual_per_n"].as_f64().unwrap();
    assert!((parts - v["expected_energy"].as_f64().unwrap()).abs() < 1e-9);
    let eap = run(&["predict", "--ensemble", "eap", "--r", "16"]);
    assert!(stdout(&eap).contains("upper_bound"));
}

#[test]
fn mc_report_formats() {
    let out = run(&["mc", "--ensemble", "uniform", "--r", "5", "--s", "2", "--trials", "2000", "--seed", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("ensemble,r,s,n"));
    assert!(lines[1].starts_with("uniform,5,2,10,1,2000,0,"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["mc", "--ensemble", "uniform", "--r", "5", "--trials", "0", "--seed", "1"],
        vec!["table", "--ensemble", "nonsense", "--rmax", "4"],
        vec!["generate", "--ensemble", "uniform", "--r", "5", "--seed", "1"],
        vec!["energy", "--in", "/nonexistent/file.json"],
        vec!["predict", "--ensemble", "harmonic", "--r", "5"],
        vec!["bogus"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn verify_subset() {
    let ok = run(&["verify", "--only", "2,3,4"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok).lines().filter(|l| l.starts_with("[PASS]")).count(), 3);
    let bad = run(&["verify", "--only", "99"]);
    assert_eq!(bad.status.code(), Some(1));
}
