//! End-to-end runs of the command line binary.

use std::path::Path;
use std::process::{Command, Output};

use cipherdescent::harness::parse_csv;
use cipherdescent::probgen::{make_instance, GenSpec};
use cipherdescent::solver::SolveResult;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cipherdescent"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_instance(dir: &Path) -> std::path::PathBuf {
    let file = dir.join("inst.json");
    make_instance(&GenSpec::new(2, 3.0, 5)).unwrap().save(&file).unwrap();
    file
}

#[test]
fn solve_plain_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_instance(dir.path());
    let trace = dir.path().join("trace.json");

    let out = cli(&["solve", "--instance", path(&inst), "--algo", "gd", "--iters", "9", "--trace", path(&trace)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let res: SolveResult = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(res.per_iteration.len(), 10);

    let out = cli(&["solve", "--instance", path(&inst), "--algo", "agd", "--iters", "7", "--backend", "sim"]);
    assert_eq!(out.status.code(), Some(3));

    let missing = dir.path().join("none.json");
    let out = cli(&["solve", "--instance", path(&missing), "--algo", "gd", "--iters", "1"]);
    assert_eq!(out.status.code(), Some(4));

    let report = dir.path().join("r.csv");
    let out = cli(&["bench", "--reps", "0", "--out", path(&report)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn keygen_then_encrypted_solve() {
    let dir = tempfile::tempdir().unwrap();
    let keys = dir.path().join("keys");
    let out = cli(&[
        "keygen", "--preset", "insecure-test", "--out", path(&keys), "--n", "256", "--depth", "4", "--dims", "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let inst = write_instance(dir.path());
    let trace = dir.path().join("trace.json");
    let out = cli(&[
        "solve", "--instance", path(&inst), "--algo", "gd", "--iters", "2", "--backend", "ckks",
        "--keys", path(&keys), "--depth-budget", "4", "--trace", path(&trace),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let res: SolveResult = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    let levels: Vec<_> = res.per_iteration.iter().map(|r| r.level).collect();
    assert_eq!(levels, vec![Some(4), Some(2), Some(0)]);
}

#[test]
fn bench_and_trace_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.csv");
    let out = cli(&["bench", "--dims", "2,4", "--kappas", "2,20", "--reps", "3", "--out", path(&report), "--seed", "9"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = parse_csv(std::fs::File::open(&report).unwrap()).unwrap();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.seed == 9));

    let traj = dir.path().join("traj.csv");
    let out = cli(&["trace", "--fig2", "--backend", "plain", "--reps", "4", "--out", path(&traj)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&traj).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rep,t,x0,x1,distance,tolerance,level"));
    assert_eq!(lines.count(), 4 * 7);
}
