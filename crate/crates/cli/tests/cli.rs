use std::process::{Command, Output};

use zipper_core::combinators::{compile, parse_term};
use zipper_core::graph::{isomorphic, parse_zg, IsoOptions};

fn zl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zl")).args(args).output().expect("run zl")
}

#[test]
fn compile_writes_a_graph() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("skk.zg");
    let o = zl(&["compile", "S K K", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    let g = parse_zg(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(g.node_count(), 11);
}

#[test]
fn reduce_identity_application() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nf.zg");
    let log = dir.path().join("trace.log");
    let o = zl(&["reduce", "I I", "-o", out.to_str().unwrap(), "--trace", log.to_str().unwrap()]);
    assert!(o.status.success());
    let g = parse_zg(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let i = compile(&parse_term("I").unwrap());
    assert!(isomorphic(&g.strip_loops().0, &i, IsoOptions::default()));
    let trace = std::fs::read_to_string(&log).unwrap();
    assert!(trace.lines().any(|l| l.starts_with("step 1: ")));
}

#[test]
fn reduce_reads_zg_files() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("ki.zg");
    assert!(zl(&["compile", "K I I", "-o", src.to_str().unwrap()]).status.success());
    let o = zl(&["reduce", src.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("normal-form"));
}

#[test]
fn death_reports_loop_counts() {
    let o = zl(&["verify", "death"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    for (t, n) in [("I", 1), ("K", 2), ("S", 3)] {
        assert!(text.contains(&format!("ok   {t}: {n} loops")), "{text}");
    }
}

#[test]
fn bad_input_exits_with_2() {
    let o = zl(&["compile", "S (K"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position"));
    assert_eq!(zl(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(zl(&["reduce", "I", "--priority", "click,warp"]).status.code(), Some(2));
    assert_eq!(zl(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn knots_emits_a_diagram() {
    let o = zl(&["knots", "I"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).lines().any(|l| l.starts_with("X +1")));
    assert_eq!(zl(&["knots", "K"]).status.code(), Some(2));
}

#[test]
fn fuzz_agrees() {
    let o = zl(&["fuzz", "--count", "20", "--max-size", "8", "--seed", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
}
