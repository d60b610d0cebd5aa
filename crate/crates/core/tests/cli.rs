//! The `sr` commands, run in-process and as a real binary.

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use strong_roommates::cli::{run, EXIT_DECIDED, EXIT_INPUT, EXIT_LIMIT};

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn sr(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sr").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn result_line(text: &str) -> &str {
    text.lines().find(|l| l.starts_with("result: ")).unwrap()
}

#[test]
fn solve_examples() {
    let (code, out, _) = sr(&["solve", &data("single_edge.txt")]);
    assert_eq!(code, EXIT_DECIDED);
    assert_eq!(out, "result: yes\nmatching: a-b\niterations: 0\n");

    let (code, out, _) = sr(&["solve", &data("path_tie.txt")]);
    assert_eq!(code, EXIT_DECIDED);
    assert!(out.starts_with("result: no\nreason: polytope-empty\n"));

    let (code, out, _) = sr(&["solve", &data("cyclic_triangle.txt"), "--trace"]);
    assert_eq!(code, EXIT_DECIDED);
    assert_eq!(result_line(&out), "result: no");
    assert!(out.contains("cut: {a,b,c} lhs=3/2 rhs=1"));
}

#[test]
fn oracle_mirrors_solve() {
    for file in ["single_edge.txt", "path_tie.txt", "cyclic_triangle.txt", "strict_path.txt", "four_cycle.txt"] {
        let (_, solved, _) = sr(&["solve", &data(file)]);
        let (code, brute, _) = sr(&["oracle", &data(file)]);
        assert_eq!(code, EXIT_DECIDED);
        assert_eq!(result_line(&solved), result_line(&brute), "{}", file);
        assert!(brute.contains("method: brute-force"));
    }
    let (code, _, err) = sr(&["oracle", &data("four_cycle.txt"), "--max-edges", "2"]);
    assert_eq!(code, EXIT_LIMIT);
    assert!(err.contains("cap"));
}

#[test]
fn certificate_and_check() {
    let (code, out, _) = sr(&["solve", &data("four_cycle.txt"), "--certificate", "--check"]);
    assert_eq!(code, EXIT_DECIDED);
    assert!(out.contains("check: strongly-stable"));
    for line in ["a-b=1/1", "a-d=0/1", "b-c=0/1", "c-d=1/1"] {
        assert!(out.lines().any(|l| l == line), "missing {}", line);
    }
}

#[test]
fn json_matches_plain() {
    for file in ["single_edge.txt", "path_tie.txt", "cyclic_triangle.txt", "strict_path.txt", "four_cycle.txt"] {
        let (_, plain, _) = sr(&["solve", &data(file)]);
        let (code, json, _) = sr(&["solve", &data(file), "--json", "--trace", "--certificate"]);
        assert_eq!(code, EXIT_DECIDED);
        let v: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(format!("result: {}", v["result"].as_str().unwrap()), result_line(&plain));
        let matching = plain.lines().find_map(|l| l.strip_prefix("matching: "));
        let json_matching =
            v["matching"].as_array().map(|a| a.iter().map(|s| s.as_str().unwrap()).collect::<Vec<_>>().join(" "));
        assert_eq!(matching.map(str::to_string), json_matching);
        assert_eq!(
            format!("iterations: {}", v["iterations"]),
            plain.lines().find(|l| l.starts_with("iterations: ")).unwrap()
        );
    }
}

#[test]
fn verify_examples() {
    let (code, out, _) = sr(&["verify", &data("strict_path.txt"), "a-b"]);
    assert_eq!((code, out.as_str()), (EXIT_DECIDED, "strongly-stable: true\n"));
    let (code, out, _) = sr(&["verify", &data("path_tie.txt"), "a-b"]);
    assert_eq!((code, out.as_str()), (EXIT_DECIDED, "strongly-stable: false blocking-edge: b-c\n"));
    let (code, _, err) = sr(&["verify", &data("path_tie.txt"), "a-b", "b-c"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("share a vertex"));
    let (code, _, _) = sr(&["verify", &data("path_tie.txt"), "a-q"]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn gen_examples() {
    let (code, out, _) = sr(&["gen", "-n", "1", "--seed", "5"]);
    assert_eq!((code, out.as_str()), (EXIT_DECIDED, "agents: a\nprefs a:\n"));
    let (_, strict, _) = sr(&["gen", "-n", "7", "--tie-prob", "0", "--seed", "2"]);
    assert!(!strict.contains('('));
    let once = sr(&["gen", "-n", "8", "--seed", "11"]);
    let twice = sr(&["gen", "-n", "8", "--seed", "11"]);
    assert_eq!(once, twice);
    let (code, _, _) = sr(&["gen", "-n", "3", "--edge-prob", "2"]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn crosscheck_random_batch() {
    let (code, out, _) = sr(&["crosscheck", "--random", "n=6", "count=40", "seed=1", "tie=1/3"]);
    assert_eq!(code, EXIT_DECIDED, "{}", out);
    assert!(out.contains("agreement: 40/40"));
    let (code, out, _) = sr(&["crosscheck", "--random", "n=6", "count=30", "tie=0"]);
    assert_eq!(code, EXIT_DECIDED);
    assert!(out.contains("strict-consistency: 30/30"));
    let (code, _, _) = sr(&["crosscheck", "--random", "bogus=1"]);
    assert_eq!(code, EXIT_INPUT);
    let (code, _, _) = sr(&["crosscheck"]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(sr(&["solve", "/nonexistent/instance.txt"]).0, EXIT_INPUT);
    assert_eq!(sr(&["frobnicate"]).0, EXIT_INPUT);
    assert_eq!(sr(&["solve", &data("single_edge.txt"), "--separation", "magic"]).0, EXIT_INPUT);
    assert_eq!(sr(&["--help"]).0, EXIT_DECIDED);
}

#[test]
fn limits_exit_three() {
    let (code, _, err) = sr(&["solve", &data("cyclic_triangle.txt"), "--limit-cuts", "0"]);
    assert_eq!(code, EXIT_LIMIT);
    assert!(err.contains("cut limit"));
    let (code, _, _) = sr(&["solve", &data("four_cycle.txt"), "--limit-pivots", "0"]);
    assert_eq!(code, EXIT_LIMIT);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_sr");
    let out = Command::new(bin).args(["solve", &data("path_tie.txt")]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("result: no"));
    let out = Command::new(bin).args(["verify", &data("path_tie.txt"), "a-b", "b-c"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
