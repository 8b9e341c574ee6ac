use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn teirp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teirp")).args(args).current_dir(dir).output().expect("teirp runs")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn solve_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&teirp(&["gen", "micro", "--n", "3", "--tau", "2", "--seed", "3", "--out", "m.txt"], d));
    ok(&teirp(&["solve", "m.txt", "--out", "r.json"], d));
    assert!(ok(&teirp(&["validate", "m.txt", "r.json"], d)).starts_with("valid"));

    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "optimal");
    let obj = report["objective"].as_f64().unwrap();
    let oracle = ok(&teirp(&["oracle", "m.txt"], d));
    let value: f64 = oracle.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((value - obj).abs() <= 1e-6 * obj.abs());
}

#[test]
fn tampered_report_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&teirp(&["gen", "micro", "--n", "3", "--tau", "2", "--seed", "1", "--out", "m.txt"], d));
    ok(&teirp(&["solve", "m.txt", "--out", "r.json"], d));
    let mut report: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    let cost = report["solution"]["cost"].as_f64().unwrap();
    report["solution"]["cost"] = (cost + 1.0).into();
    fs::write(d.join("bad.json"), report.to_string()).unwrap();
    let out = teirp(&["validate", "m.txt", "bad.json"], d);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("cost"));
}

#[test]
fn deterministic_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&teirp(&["gen", "micro", "--n", "4", "--tau", "2", "--seed", "7", "--out", "m.txt"], d));
    let a = ok(&teirp(&["solve", "m.txt", "--no-times", "--threads", "3"], d));
    let b = ok(&teirp(&["solve", "m.txt", "--no-times", "--threads", "1"], d));
    assert_eq!(a, b);
}

#[test]
fn bench_writes_three_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::create_dir(d.join("set")).unwrap();
    ok(&teirp(&["gen", "source", "--n", "4", "--tau", "2", "--seed", "5", "--out", "src.txt"], d));
    ok(&teirp(&["gen", "--source", "src.txt", "--suppliers", "1", "--satellites", "2", "--k2", "2", "--seed", "5", "--out", "set/L3_a.txt"], d));
    ok(&teirp(&["gen", "micro", "--n", "3", "--tau", "2", "--seed", "2", "--out", "set/M_b.txt"], d));
    fs::write(d.join("set/M_c.txt"), "not an instance\n").unwrap();
    ok(&teirp(&["bench", "set", "--out", "res.csv", "--time-limit", "30"], d));

    let rows = fs::read_to_string(d.join("res.csv")).unwrap();
    assert_eq!(rows.lines().count(), 4);
    assert!(rows.lines().last().unwrap().starts_with("M_c,M,"));
    assert!(rows.contains(",error,"));
    let buckets = fs::read_to_string(d.join("res_buckets.csv")).unwrap();
    assert!(buckets.starts_with("class,combination,K2,optimal(<0.05%),<5%,>=5%,no_solution\n"));
    assert!(buckets.lines().last().unwrap().starts_with("all,"));
    assert!(d.join("res_groups.csv").exists());
}

#[test]
fn oracle_refuses_large_instances() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&teirp(&["gen", "micro", "--n", "6", "--tau", "2", "--out", "m.txt"], d));
    let out = teirp(&["oracle", "m.txt"], d);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_instance_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = teirp(&["solve", "nope.txt"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.txt"));
}
