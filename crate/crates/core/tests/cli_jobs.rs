use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const ONE_HOLE: &str = r#"{
  "precision_bits": 128,
  "lattice": {"omega1": ["1", "0"], "omega2": ["0", "1"]},
  "holes": [{"center": ["0", "0"], "shape": {"circle": {"radius": "0.4"}}}],
  "boundary_data": [{"modes": [{"k": 5, "sin": "1"}]}],
  "steklov": {"sigma_hi": "3.4", "step": "0.1", "tol": "1e-20", "interior_r": 20},
  "k_max": 8
}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_torus-harmonic"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn invariants_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "eq.json", r#"{"precision_bits": 128,
        "lattice": {"omega1": ["1", "0"], "omega2": ["0.5", "sqrt(3)/2"]}}"#);
    let out = run(&["invariants", "--config", s(&cfg)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["precision_bits"], 128);
    let g2 = v["g2"][0].as_str().unwrap().parse::<f64>().unwrap();
    assert!(g2.abs() < 1e-30);
}

#[test]
fn laplace_writes_report_and_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "job.json", ONE_HOLE);
    let out_dir = dir.path().join("out");
    let out = run(&["laplace", "--config", s(&cfg), "--grid", "6", "--bits", "160", "--out", s(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&out_dir.join("laplace_report.json"));
    assert_eq!(report["config"]["precision_bits"], 160);
    assert_eq!(report["result"]["m"], 21);
    let err: f64 = report["result"]["boundary_sup_error"].as_str().unwrap().parse().unwrap();
    assert!(err < 1e-4);
    let csv = std::fs::read_to_string(out_dir.join("laplace_field.csv")).unwrap();
    assert!(csv.starts_with("x,y,u\n"));
    assert_eq!(csv.lines().count(), 37);
}

#[test]
fn steklov_writes_report_and_eigenfunctions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "job.json", ONE_HOLE);
    let out_dir = dir.path().join("st");
    let out = run(&["steklov", "--config", s(&cfg), "--kmax", "10", "--grid", "3", "--out", s(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&out_dir.join("steklov_report.json"));
    let cands = report["result"]["candidates"].as_array().unwrap();
    assert_eq!(cands.len(), 2);
    assert_eq!(cands[1]["multiplicity"], 2);
    let sigma: f64 = cands[1]["sigma"].as_str().unwrap().parse().unwrap();
    assert!((sigma - 3.217_375_407_905_5).abs() < 1e-6);
    assert_eq!(report["result"]["eigenvalues"].as_array().unwrap().len(), 3);
    for i in 1..=2 {
        let csv = std::fs::read_to_string(out_dir.join(format!("steklov_eigenfunction_{i}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 10);
    }
}

#[test]
fn convergence_writes_one_row_per_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "job.json", ONE_HOLE);
    let out_dir = dir.path().join("cv");
    let out = run(&["convergence", "--config", s(&cfg), "--sweep", "2,4,6", "--out", s(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("convergence.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k_max,m,sup_error,cond_btb,cond_bta,status");
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.ends_with(",ok")));

    let out = run(&["convergence", "--config", s(&cfg), "--sweep", "4,2", "--out", s(&out_dir)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["laplace", "--config", s(&missing)]).status.code(), Some(1));

    let bad = write_config(dir.path(), "bad.json", &ONE_HOLE.replace("\"0.4\"", "\"1.3\""));
    assert_eq!(run(&["laplace", "--config", s(&bad)]).status.code(), Some(2));

    let typo = write_config(dir.path(), "typo.json", &ONE_HOLE.replace("\"k_max\"", "\"kmax\""));
    assert_eq!(run(&["laplace", "--config", s(&typo)]).status.code(), Some(2));

    let cfg = write_config(dir.path(), "job.json", ONE_HOLE);
    assert_eq!(run(&["laplace", "--config", s(&cfg), "--bits", "32"]).status.code(), Some(2));

    // unscaled columns span more magnitudes than 64 bits resolve
    let raw = ONE_HOLE.replace("\"k_max\": 8", "\"k_max\": 60, \"scale_columns\": false");
    let raw = write_config(dir.path(), "raw.json", &raw);
    let out = run(&["laplace", "--config", s(&raw), "--bits", "64", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = torus_harmonic::cli::JobConfig::from_path(&path).unwrap();
        let mut cheap = cfg.clone();
        cheap.precision_bits = 96;
        let job = cheap.resolve().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(job.config.holes.len(), cfg.holes.len());
        n += 1;
    }
    assert!(n >= 10);
}
