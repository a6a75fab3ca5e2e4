use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn intmin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intmin")).args(args).env_remove("INTMIN_LOG").output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn solve(instance: &str, extra: &[&str], report: &Path) -> (i32, Value) {
    let mut args = vec!["solve", "--instance", instance, "--report", report.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = intmin(&args);
    let text = std::fs::read_to_string(report).unwrap();
    (out.status.code().unwrap(), serde_json::from_str(&text).unwrap())
}

#[test]
fn solves_quadratic_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "quad.json", r#"{"type":"quadratic","target":[3,-2]}"#);
    let (code, rep) = solve(&inst, &["--radius", "8"], &dir.path().join("r.json"));
    assert_eq!(code, 0);
    assert_eq!(rep["status"], "ok");
    assert_eq!(rep["minimizer"], serde_json::json!([3, -2]));
    assert_eq!(rep["objectiveValue"], 0);
    assert_eq!(rep["schema"], "v1");
    assert!(rep["counts"]["soCalls"].as_u64().unwrap() > 0);
}

#[test]
fn solves_two_element_cut() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "cut2.json", r#"{"type":"table","n":2,"values":[0,1,1,0]}"#);
    let (code, rep) = solve(&inst, &[], &dir.path().join("r.json"));
    assert_eq!(code, 0);
    assert_eq!(rep["objectiveValue"], 0);
    let eo = rep["counts"]["eoCalls"].as_u64().unwrap();
    assert!(eo > 0);
}

#[test]
fn graph_cut_instance_and_stdout_report() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "g.json", r#"{"type":"graph_cut","n":3,"edges":[[0,1,4],[1,2,1],[0,2,2]]}"#);
    let out = intmin(&["solve", "--instance", &inst]);
    assert_eq!(out.status.code(), Some(0));
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["objectiveValue"], 0);
}

#[test]
fn malformed_instances_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("bad.json", "{not json"),
        ("neg.json", r#"{"type":"graph_cut","n":2,"edges":[[0,1,-3]]}"#),
        ("short.json", r#"{"type":"table","n":2,"values":[0,1]}"#),
    ] {
        let inst = write(dir.path(), name, text);
        assert_eq!(intmin(&["solve", "--instance", &inst]).status.code(), Some(2), "{name}");
    }
    let missing = dir.path().join("absent.json");
    assert_eq!(intmin(&["solve", "--instance", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(intmin(&["solve"]).status.code(), Some(2));
    assert_eq!(intmin(&["bench", "--family", "quad", "--sizes", "0..2"]).status.code(), Some(2));
}

#[test]
fn report_is_deterministic_apart_from_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "q.json", r#"{"type":"quadratic","target":[4,-1,2],"radius":16}"#);
    let strip = |p: &Path| -> String {
        let text = std::fs::read_to_string(p).unwrap();
        text.lines().filter(|l| !l.trim_start().starts_with("\"wallTime\"")).collect::<Vec<_>>().join("\n")
    };
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert_eq!(solve(&inst, &[], &a).0, 0);
    assert_eq!(solve(&inst, &[], &b).0, 0);
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn bench_and_verify_run() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("bench.json");
    let out = intmin(&["bench", "--family", "sfm-cut", "--sizes", "3,4", "--seeds", "2", "--report", rep.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(v["family"], "sfm-cut");
    assert_eq!(v["runs"].as_array().unwrap().len(), 4);

    let out = intmin(&["verify", "--suite", "lll", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
}
