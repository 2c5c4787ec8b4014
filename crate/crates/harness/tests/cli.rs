//! End-to-end runs of the `doi-lab` binary: exit codes, output files,
//! determinism and configuration precedence.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn doi_lab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_doi-lab"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("DOI_LAB_SEED")
        .output()
        .expect("binary runs")
}

fn bare(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_doi-lab")).args(args).env_remove("DOI_LAB_SEED").output().expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).expect("report exists")).expect("valid json")
}

#[test]
fn same_seed_gives_identical_bytes() {
    let (one, two) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&one, &two] {
        let out = doi_lab(&["convergence", "--seed", "42"], dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["convergence-42.csv", "convergence-42.json"] {
        let a = fs::read(one.path().join(name)).unwrap();
        let b = fs::read(two.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
}

#[test]
fn different_seeds_give_different_reports() {
    let dir = TempDir::new().unwrap();
    for seed in ["1", "2"] {
        assert_eq!(doi_lab(&["ssf-continuity", "--seed", seed, "--format", "json"], dir.path()).status.code(), Some(0));
    }
    let a = json(&dir.path().join("ssf-continuity-1.json"));
    let b = json(&dir.path().join("ssf-continuity-2.json"));
    assert_ne!(a["rows"], b["rows"]);
}

#[test]
fn convergence_csv_has_nine_rows_and_a_json_slope() {
    let dir = TempDir::new().unwrap();
    let out = doi_lab(&["convergence", "--seed", "7"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("convergence-7.csv")).unwrap();
    let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(data[0].starts_with("n,"), "header: {}", data[0]);
    assert_eq!(data.len(), 1 + 9);
    assert!(csv.starts_with("# doi-lab "));
    let report = json(&dir.path().join("convergence-7.json"));
    let slope = report["summary"]["slope.p1"].as_f64().unwrap();
    assert!(slope <= -0.9, "slope {slope}");
    assert_eq!(report["passed"], Value::Bool(true));
    assert_eq!(report["seed"], Value::from(7));
}

#[test]
fn text_format_ends_with_the_verdict() {
    let dir = TempDir::new().unwrap();
    let out = doi_lab(&["counterexample", "--dim-half", "2", "--format", "text"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("counterexample-0.txt")).unwrap();
    assert!(text.trim_end().ends_with("result=PASS"));
    assert!(!dir.path().join("counterexample-0.json").exists());
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        &["frobnicate"][..],
        &["convergence", "--bogus"],
        &["convergence", "--m", "4"],
        &["main-estimate", "--p", "0.5"],
        &["main-estimate", "--format", "xml"],
        &["main-estimate", "--f", "no-such-function"],
        &["counterexample", "--tol", "no-such=1"],
        &["counterexample", "--tol", "first"],
        &[],
    ] {
        let out = bare(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn help_and_version_exit_with_zero() {
    assert_eq!(bare(&["--help"]).status.code(), Some(0));
    assert_eq!(bare(&["--version"]).status.code(), Some(0));
    assert_eq!(bare(&["convergence", "--help"]).status.code(), Some(0));
}

#[test]
fn failed_check_exits_with_two_and_still_writes() {
    let dir = TempDir::new().unwrap();
    let out = doi_lab(&["counterexample", "--tol", "first=-1", "--format", "json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let report = json(&dir.path().join("counterexample-0.json"));
    assert_eq!(report["passed"], Value::Bool(false));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn unwritable_output_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let out = doi_lab(&["counterexample"], &blocker.join("sub"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_falls_back_to_the_environment() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_doi-lab"))
        .args(["counterexample", "--format", "json", "--out"])
        .arg(dir.path())
        .env("DOI_LAB_SEED", "31")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&dir.path().join("counterexample-31.json"))["seed"], Value::from(31));

    let out = Command::new(env!("CARGO_BIN_EXE_doi-lab"))
        .args(["counterexample", "--seed", "5", "--format", "json", "--out"])
        .arg(dir.path())
        .env("DOI_LAB_SEED", "31")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("counterexample-5.json").exists());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("lab.conf");
    fs::write(&cfg, "# shared settings\nseed = 11\ndim-half = 3\nformat = json\ntol.first = 1e-12\n").unwrap();
    let cfg_arg = cfg.to_str().unwrap();

    let out = doi_lab(&["counterexample", "--config", cfg_arg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("counterexample-11.json"));
    assert_eq!(report["parameters"]["dim_half"], Value::from(3));
    assert_eq!(report["parameters"]["tol.first"].as_f64(), Some(1e-12));

    let out = doi_lab(&["counterexample", "--config", cfg_arg, "--seed", "12", "--dim-half", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = json(&dir.path().join("counterexample-12.json"));
    assert_eq!(report["parameters"]["dim_half"], Value::from(2));

    fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(doi_lab(&["counterexample", "--config", cfg_arg], dir.path()).status.code(), Some(1));
    assert_eq!(doi_lab(&["counterexample", "--config", "/no/such/file"], dir.path()).status.code(), Some(1));
}
