use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const MARKED_TRIANGLE: &str = r#"{"matrix": [[1,0,0],[1,3,0],[1,0,3],[1,1,0],[1,0,2]]}"#;
const CUBIC: &str = r#"{"matrix": [[1,0],[1,1],[1,3]], "labels": ["y0", "y1", "y3"]}"#;

fn run(args: &[&str], stdin: &str, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gkzkit"));
    cmd.args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).env_remove("GKZKIT_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("binary runs");
    child.stdin.take().expect("stdin").write_all(stdin.as_bytes()).expect("write stdin");
    child.wait_with_output().expect("process finishes")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn points(v: &Value) -> Vec<Vec<i64>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|p| p.as_array().unwrap().iter().map(|x| x.as_str().unwrap().parse().unwrap()).collect())
        .collect()
}

#[test]
fn face_saturation_lists_added_points() {
    let out = run(&["saturate", "--mode", "s"], MARKED_TRIANGLE, &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["status"], "ok");
    assert_eq!(points(&r["result"]["added_points"]), vec![vec![1, 0, 1], vec![1, 1, 1], vec![1, 2, 0]]);
    assert_eq!(r["input"]["matrix"][1][1], 3);
    assert!(r["version"].is_string());
}

#[test]
fn cubic_multiplicity_table() {
    let out = run(&["mults"], CUBIC, &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let table = r["result"]["table"].as_array().unwrap();
    let vertex_m: Vec<&str> = table
        .iter()
        .filter(|row| row["face"]["dim"] == 0)
        .map(|row| row["multiplicity"].as_str().unwrap())
        .collect();
    assert_eq!(vertex_m, vec!["1", "2"]);
}

#[test]
fn malformed_input_exits_two() {
    let out = run(&["faces"], r#"{"matrix": [[1, 0], [1"#, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "input_error");
    let out = run(&["redundant", "--col", "9"], CUBIC, &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["nonresonant"], CUBIC, &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rejections_exit_one() {
    let out = run(&["aux-check", "--k", "0", "--a", "4"], MARKED_TRIANGLE, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["certified"], false);
    let out = run(&["curve", "monodromy", "--delta", "3", "--beta", "0,0"], "", &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn budget_override_exits_three() {
    let out = run(&["curve", "edet", "--delta", "5"], "", &[("GKZKIT_BUDGET", "3")]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"], "budget_exceeded");
    let out = run(&["curve", "edet", "--delta", "5"], "", &[]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    for args in [vec!["faces"], vec!["mults"], vec!["secondary", "--enumerate"], vec!["reduce", "--mode", "p"]] {
        let a = run(&args, MARKED_TRIANGLE, &[]);
        let b = run(&args, MARKED_TRIANGLE, &[]);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn series_extension_round_trip() {
    let input = r#"{"matrix": [[1,0],[1,1],[1,2],[1,3]], "beta": ["0", "1/2"]}"#;
    let out = run(&["series", "--extend", "--col", "2", "--order", "6"], input, &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["result"]["restriction_matches_input"], true);
    assert!(r["result"]["annihilation"]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn curve_commands() {
    let out = run(&["curve", "verify", "--exponents", "0,1,3"], "", &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["result"]["holds"], true);
    assert_eq!(points(&r["result"]["newton_vertices"]), vec![vec![1, 3, 2], vec![3, 0, 3]]);

    let out = run(&["curve", "disc", "--delta", "2"], "", &[]);
    assert_eq!(json(&out)["result"]["discriminant"]["text"], "4*y0*y2 - y1^2");

    let out = run(&["curve", "monodromy", "--delta", "3", "--beta", "1/5,1/3"], "", &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["result"]["generators"]["invariants_agree"], true);
    assert!(r["result"]["generators"]["max_deviation"].as_f64().unwrap() < 1e-6);
}
