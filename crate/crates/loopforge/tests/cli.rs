use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_loopforge"));
    c.env_remove("LOOPFORGE_SEED");
    c
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn loopforge")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn stderr_error(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stderr).expect("JSON on stderr");
    v["error"].clone()
}

#[test]
fn demo_is_deterministic() {
    let a = run(&["demo", "--seed", "7"]);
    let b = run(&["demo", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["loop_erasure_recovers_gamma"], true);
    let c = run(&["demo", "--jobs", "3", "--seed", "7"]);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn seed_falls_back_to_environment() {
    let flag = run(&["lerw", "--domain", "7x7", "--seed", "42"]);
    let env = bin().args(["lerw", "--domain", "7x7"]).env("LOOPFORGE_SEED", "42").output().unwrap();
    assert_eq!(stdout_json(&flag)["samples"], stdout_json(&env)["samples"]);
}

#[test]
fn attach_fixture_reaches_the_loop_corner() {
    let cfg = fixture("straight.json");
    let out = run(&["attach", "--config", cfg.to_str().unwrap(), "--tie-break", "first"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let samples = v["x"]["samples"].as_array().unwrap();
    assert_eq!(v["x"]["duration"], 6.0);
    assert_eq!(samples[3], serde_json::json!([3.0, 2.0, 1.0]));
    assert_eq!(samples[6], serde_json::json!([6.0, 2.0, 0.0]));
    assert_eq!(v["total_time"], 6.0);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let soup = dir.path().join("soup.json");
    let out = run(&["soup", "--domain", "4x4", "--max-len", "6", "--seed", "3", "--out", soup.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&soup).unwrap()).unwrap();
    assert_eq!(v["meta"]["source"], "lattice-exact");
    assert!(v["meta"]["truncated_mass"].as_f64().unwrap() > 0.0);
}

#[test]
fn dist_and_regularity_on_fixture() {
    let cfg = fixture("straight.json");
    let p = cfg.to_str().unwrap();
    let v = stdout_json(&run(&["dist", "--a", p, "--b", p]));
    assert_eq!(v["d_R0"], 0.0);
    let out = run(&["regularity", "--config", p]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["roots_unique"], true);
}

#[test]
fn intensity_verification_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let svg = dir.path().join("t.svg");
    let out = run(&[
        "verify",
        "intensity",
        "--k",
        "2",
        "--replicates",
        "2000",
        "--seed",
        "1",
        "--csv",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = stdout_json(&out);
    assert_eq!(v["report"]["passed"], true);
    let row = &v["report"]["statistics"]["rows"][0];
    assert_eq!(row["target"], 0.125);
    assert!(std::fs::read_to_string(csv).unwrap().lines().count() >= 2);
    assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn failing_verification_exits_one_and_still_reports() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = run(&[
        "verify",
        "srw",
        "--replicates",
        "200",
        "--max-len",
        "2",
        "--seed",
        "1",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["report"]["passed"], false);
    assert!(v["report"]["flags"].as_array().unwrap().iter().any(|f| f == "K too small"));
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["soup", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["kind"], "usage");
    let out = run(&["verify", "tail", "--prefix-len", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["kind"], "usage");
}

#[test]
fn malformed_json_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"gamma\": [").unwrap();
    let out = run(&["attach", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["kind"], "json");
    let out = run(&["attach", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["kind"], "io");
}

#[test]
fn invalid_configurations_are_rejected() {
    for (name, kind) in [
        ("self_crossing_gamma.json", "precondition"),
        ("odd_loop.json", "validation"),
        ("mesh_mismatch.json", "precondition"),
    ] {
        let out = run(&["attach", "--config", fixture(name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert_eq!(stderr_error(&out)["kind"], kind, "{name}");
        assert!(out.stdout.is_empty());
    }
}
