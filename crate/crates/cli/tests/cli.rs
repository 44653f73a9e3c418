use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn pqubo() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pqubo"));
    cmd.env_remove("PQUBO_SEED");
    cmd
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    pqubo().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}):\n{}\nstderr:\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn example(dir: &TempDir) -> PathBuf {
    write(dir, "example.cnf", "c one clause\np cnf 3 1\n1 -2 3 0\n")
}

#[test]
fn solve_worked_example() {
    let dir = TempDir::new().unwrap();
    let f = example(&dir);
    let out = run(&["solve", s(&f), "--samples", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["status"], "satisfying");
    assert_eq!(r["result"]["literals"].as_array().unwrap().len(), 1);
    assert_eq!(r["result"]["energy"], 1.0);
    assert_eq!(r["result"]["verdict"]["minimum"], true);
    assert_eq!(r["config"]["sa_initial"]["num_samples"], 100);
}

#[test]
fn empty_clause_is_unsat() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "empty.cnf", "p cnf 2 2\n1 2 0\n0\n");
    let out = run(&["solve", s(&f)]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["status"], "unsat");
    assert!(r["note"].as_str().unwrap().to_lowercase().contains("unsat"));
}

#[test]
fn unit_conflict_is_unsat() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "conflict.cnf", "p cnf 2 3\n1 0\n-1 2 0\n-2 0\n");
    assert_eq!(run(&["solve", s(&f)]).status.code(), Some(2));
}

#[test]
fn usage_and_parse_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["solve"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    let bad = write(&dir, "bad.cnf", "p cnf 2 1\n1 x 0\n");
    let out = run(&["solve", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    let missing = dir.path().join("missing.cnf");
    assert_eq!(run(&["encode", s(&missing)]).status.code(), Some(1));
}

#[test]
fn encode_dimensions() {
    let dir = TempDir::new().unwrap();
    let out = run(&["encode", s(&example(&dir))]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["model"]["dim"], 7);
    assert_eq!(r["model"]["roles"].as_array().unwrap().len(), 7);

    let two = write(&dir, "two.cnf", "p cnf 3 2\n1 2 0\n-1 3 0\n");
    let r = json(&run(&["encode", s(&two)]));
    assert_eq!(r["model"]["dim"], 6);
}

#[test]
fn encode_ising_prints_spot_check() {
    let dir = TempDir::new().unwrap();
    let out = run(&["encode", s(&example(&dir)), "--ising"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["model"]["kind"], "ising");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ising spot-check"), "{err}");
    assert!(err.contains("= 0e0"), "{err}");
}

#[test]
fn encode_to_file() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("model.cnf");
    let out = run(&["encode", s(&example(&dir)), "--format", "dimacs", "-o", s(&target)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::metadata(&target).unwrap().len() > 0);
}

#[test]
fn shrink_reaches_single_literal() {
    let dir = TempDir::new().unwrap();
    let f = example(&dir);
    let model = write(&dir, "model.txt", "1\n-2\n3\n");
    let out = run(&["shrink", s(&f), "--model", s(&model), "--iter"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["result"]["size"], 1);
    assert_eq!(r["result"]["subset_of_model"], true);
    let lit = r["result"]["literals"][0].as_i64().unwrap();
    assert!([1, -2, 3].contains(&lit));
}

#[test]
fn shrink_rejects_non_model() {
    let dir = TempDir::new().unwrap();
    let f = example(&dir);
    let model = write(&dir, "model.txt", "-1\n2\n-3\n");
    let out = run(&["shrink", s(&f), "--model", s(&model)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn project_counts_visible_only() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "proj.cnf", "p cnf 4 2\n1 2 3 0\n-1 4 0\n");
    let out = run(&["project", s(&f), "--visible", "1-2", "--samples", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["result"]["verdict"]["satisfying"], true);
    assert!(r["result"]["scoped_size"].as_u64().unwrap() <= 2);
}

#[test]
fn verify_assignments() {
    let dir = TempDir::new().unwrap();
    let f = example(&dir);
    let good = run(&["verify", s(&f), "--assignment", "1"]);
    assert_eq!(good.status.code(), Some(0));
    assert_eq!(json(&good)["verdict"]["minimum"], true);
    let bad = run(&["verify", s(&f), "--assignment", "-1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(json(&bad)["verdict"]["satisfying"], false);
    let bits = write(&dir, "bits.txt", "1100000\n");
    let r = json(&run(&["verify", s(&f), "--bits", s(&bits)]));
    assert_eq!(r["verdict"]["consistent"], false);
}

#[test]
fn bench_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let args = |out: &Path| {
        vec![
            "bench".to_string(),
            "--ns".into(),
            "8".into(),
            "--instances".into(),
            "2".into(),
            "--samples".into(),
            "50".into(),
            "--round-samples".into(),
            "20".into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    for out in [&a, &b] {
        let o = pqubo().args(args(out)).output().unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["records.jsonl", "summary.csv"] {
        let x = std::fs::read(a.join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, std::fs::read(b.join(name)).unwrap(), "{name} differs");
    }
}

#[test]
fn seed_from_environment() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.cnf", "p cnf 4 2\n1 2 3 0\n-1 4 -2 0\n");
    let with_env = pqubo()
        .args(["solve", s(&f), "--samples", "20"])
        .env("PQUBO_SEED", "77")
        .output()
        .unwrap();
    let r = json(&with_env);
    assert_eq!(r["config"]["sa_initial"]["seed"], 77);
    let explicit = run(&["solve", s(&f), "--samples", "20", "--seed", "77"]);
    assert_eq!(with_env.stdout, explicit.stdout);
}

#[test]
fn expression_input() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "e.bexpr", "(or (and x1 x2) x3)\n");
    let out = run(&["solve", s(&f), "--samples", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["formula"]["original_vars"], 3);
    let visible = r["result"]["visible_literals"].as_array().unwrap();
    assert!(visible.iter().all(|l| l.as_i64().unwrap().unsigned_abs() <= 3));
}
