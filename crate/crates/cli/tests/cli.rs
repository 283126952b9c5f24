use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn msmp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msmp"))
        .args(args)
        .env_remove("MSMP_SOLVER")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(name: &str) -> String {
    fixture(name).display().to_string()
}

#[test]
fn plain_answer_line() {
    let o = msmp(&["mus", &path("e2.cnf"), "--alg", "deletion"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "v 1 2 0\n");
}

#[test]
fn solve_subcommand_matches_shorthand() {
    let a = msmp(&["mus", &path("php32.cnf"), "--alg", "quickxplain"]);
    let b = msmp(&["solve", "mus", &path("php32.cnf"), "--alg", "quickxplain"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn json_stats() {
    let o = msmp(&["mcs", &path("php32.cnf"), "--alg", "deletion", "--stats", "json", "--no-timing"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["problem"], "mcs");
    assert_eq!(v["algorithm"], "deletion");
    assert!(v["time_ms"].is_null());
    assert!(v["oracle_calls"].as_u64().unwrap() >= 9);
    assert_eq!(v["answer"].as_array().unwrap().len(), 1);
}

#[test]
fn optimization_output() {
    let o = msmp(&["smcs", &path("php32.cnf")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("o 1"));
    assert!(lines.next().unwrap().starts_with("v "));

    let o = msmp(&["smcs", &path("php32.cnf"), "--stats", "json", "--no-timing"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["answer"]["optimum"], 1);
}

#[test]
fn plain_stats_comment_lines() {
    let o = msmp(&["mus", &path("e2.cnf"), "--stats", "plain", "--no-timing"]);
    assert_eq!(
        stdout(&o),
        "v 1 2 0\nc problem mus\nc algorithm progression\nc oracle_calls 4\nc predicate_tests 3\nc time_ms null\n"
    );
}

#[test]
fn precondition_failure_exits_one() {
    let o = msmp(&["mus", &path("sat.cnf")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("satisfiable"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cnf");
    std::fs::write(&bad, "p cnf 2 1\n1 3 0\n").unwrap();
    let o = msmp(&["mus", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = msmp(&["mus", "/nonexistent/input.cnf"]);
    assert_eq!(o.status.code(), Some(2));

    let o = msmp(&["mus", &path("rain.fml")]);
    assert_eq!(o.status.code(), Some(2));

    let o = msmp(&["nosuchproblem", &path("e2.cnf")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn side_inputs() {
    let o = msmp(&["pit", &path("sat.cnf"), "--term", "1 -2 3 -4", "--alg", "deletion"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = msmp(&["pit", &path("sat.cnf"), "--term", "-3"]);
    assert_eq!(o.status.code(), Some(1));
    let o = msmp(&["pit", &path("sat.cnf")]);
    assert_eq!(o.status.code(), Some(2));
    let o = msmp(&["leic", &path("sat.cnf"), "--unit-index", "9"]);
    assert_eq!(o.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.txt");
    std::fs::write(&model, "s SATISFIABLE\nv 1 2 3 -4 0\n").unwrap();
    let o = msmp(&["backbone", &path("sat.cnf"), "--model", model.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "v 3 0\n");
    std::fs::write(&model, "v -1 -2 -3 -4 0\n").unwrap();
    let o = msmp(&["backbone", &path("sat.cnf"), "--model", model.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn autarky_forms_agree() {
    let l = msmp(&["autarky", &path("e2.cnf")]);
    let b = msmp(&["autarky", &path("e2.cnf"), "--aut-form", "b"]);
    assert_eq!(l.status.code(), Some(0));
    assert_eq!(stdout(&l), stdout(&b));
    assert_eq!(stdout(&l), "v 2 0\n");
}

#[test]
fn reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_msmp"))
        .args(["mus", "-", "--alg", "insertion"])
        .env_remove("MSMP_SOLVER")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"p cnf 1 2\n1 0\n-1 0\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout(&o), "v 1 2 0\n");
}

#[test]
fn random_order_is_seeded() {
    let run = |seed: &str| stdout(&msmp(&["mcs", &path("php32.cnf"), "--random-order", "--seed", seed, "--alg", "deletion"]));
    assert_eq!(run("7"), run("7"));
    let distinct: std::collections::BTreeSet<String> = (0..8).map(|s| run(&s.to_string())).collect();
    assert!(distinct.len() > 1);
}

#[test]
fn solver_env_overrides_flag() {
    let o = Command::new(env!("CARGO_BIN_EXE_msmp"))
        .args(["mus", &path("e2.cnf")])
        .env("MSMP_SOLVER", "exec:/nonexistent/solver")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn bench_csv() {
    let o = msmp(&["bench", "--r", "12", "--m", "3", "--seeds", "2", "--algs", "deletion,dichotomic", "--no-timing", "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "problem,alg,r,m,calls,ms");
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[1], "mus,deletion,12,3,12,0.000");
}

#[test]
fn bench_over_directory() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("e2.cnf"), dir.path().join("a.cnf")).unwrap();
    std::fs::copy(fixture("php32.cnf"), dir.path().join("b.cnf")).unwrap();
    let o = msmp(&["bench", "--dir", dir.path().to_str().unwrap(), "--algs", "deletion", "--no-timing"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "problem,alg,r,m,calls,ms\nmus,deletion,3,2,3,0.000\nmus,deletion,9,9,9,0.000\n");
}

#[test]
fn verify_report() {
    let o = msmp(&["verify", "--seeds", "3", "--problems", "mus,backbone", "--algs", "deletion"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("ok ")), "{out}");
    assert!(!out.contains("not ok"));
}
