use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const MODEL: &str = "\
# small model that samples quickly
alpha = 0.5
vartheta = 1
q = 1
r = auto
lambda = exp(1)
boundary = const(1)
";

fn fptsim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fptsim")).current_dir(dir).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by a signal")
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("model.conf"), MODEL).unwrap();
    dir
}

fn rows(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let body = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, body)
}

#[test]
fn sample_writes_triplets_and_sidecar() {
    let dir = setup();
    let out = fptsim(dir.path(), &["sample", "--config", "model.conf", "--n", "200", "--seed", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let (header, body) = rows(&dir.path().join("sample.csv"));
    assert_eq!(header, "tau,undershoot,overshoot,M,K");
    assert_eq!(body.len(), 200);
    for r in &body {
        assert!(r[0] > 0.0 && r[1] <= 1.0 && r[2] > 1.0 && r[1] < r[2], "{r:?}");
        assert!(r[3] >= 1.0 && r[4] >= 0.0);
    }
    let meta: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("sample.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 3);
    assert_eq!(meta["n"], 200);
}

#[test]
fn flags_override_the_config_file() {
    let dir = setup();
    let args = ["sample", "--config", "model.conf", "--n", "50", "--boundary", "linear(2, 0.5)", "--out", "b.csv"];
    assert_eq!(code(&fptsim(dir.path(), &args)), 0);
    let (_, body) = rows(&dir.path().join("b.csv"));
    for r in &body {
        let level = (2.0 - 0.5 * r[0]).max(0.0);
        assert!(r[1] <= level && r[2] >= level, "{r:?} at {level}");
    }
    assert!(dir.path().join("b.json").exists());
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let dir = setup();
    let base = ["sample", "--config", "model.conf", "--n", "300", "--seed", "11"];
    for (threads, name) in [("1", "one.csv"), ("3", "three.csv")] {
        let args: Vec<&str> = base.iter().copied().chain(["--threads", threads, "--out", name]).collect();
        assert_eq!(code(&fptsim(dir.path(), &args)), 0);
    }
    assert_eq!(fs::read(dir.path().join("one.csv")).unwrap(), fs::read(dir.path().join("three.csv")).unwrap());
}

#[test]
fn drift_moves_the_crossing_up() {
    let dir = setup();
    let args = ["sample", "--config", "model.conf", "--n", "100", "--drift", "0.5"];
    assert_eq!(code(&fptsim(dir.path(), &args)), 0);
    let (_, body) = rows(&dir.path().join("sample.csv"));
    assert!(body.iter().all(|r| r[1] <= 1.0 && r[2] >= 1.0));
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = setup();
    fs::write(dir.path().join("bad.conf"), "alpha 0.5\n").unwrap();
    let cases: [&[&str]; 5] = [
        &["sample", "--config", "model.conf", "--alpha", "1.5"],
        &["sample", "--config", "model.conf", "--no-such-flag"],
        &["sample", "--config", "missing.conf"],
        &["sample", "--config", "bad.conf"],
        &["sample", "--config", "model.conf", "--threads", "0"],
    ];
    for args in cases {
        let out = fptsim(dir.path(), args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn runtime_errors_exit_with_one() {
    let dir = setup();
    let out = fptsim(dir.path(), &["sample", "--config", "model.conf", "--out", "no/such/dir/s.csv"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn bench_writes_one_row_per_point() {
    let dir = setup();
    let out = fptsim(dir.path(), &["bench", "--grid", "fig3", "--n", "20"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let (header, body) = rows(&dir.path().join("bench.csv"));
    assert_eq!(header, "alpha,q,vartheta,c0,r,rho,n,mean_s,median_s,p90_s,mean_M,mean_K");
    assert_eq!(body.len(), 3);
    assert!(body.iter().all(|r| r[6] == 20.0 && r[7] > 0.0));
}

#[test]
fn fpde_writes_the_grid() {
    let dir = setup();
    let out = fptsim(dir.path(), &["fpde", "--horizon", "1", "--n", "200"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let (header, body) = rows(&dir.path().join("fpde.csv"));
    assert_eq!(header, "x1,x2,estimate,ci_half_width,n");
    assert_eq!(body.len(), 9);
    assert!(body.iter().all(|r| r[3] >= 0.0 && r[4] == 200.0));
}

#[test]
fn validate_reports_every_check() {
    let dir = setup();
    let out = fptsim(dir.path(), &["validate", "--suite", "quick"]);
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("validate.json")).unwrap()).unwrap();
    let checks = report.as_object().unwrap();
    assert_eq!(checks.len(), 11);
    let all_pass = checks.values().all(|c| c["pass"].as_bool().unwrap() && c.get("statistic").is_some() && c.get("p").is_some());
    assert_eq!(code(&out), if all_pass { 0 } else { 1 });
}
