use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).to_string_lossy().into_owned()
}

fn towerlen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_towerlen")).args(args).env_remove("TOWERLEN_FORMAT").output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let out = towerlen(&a);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

#[test]
fn fundamental_sequence_term() {
    let (code, v) = json(&["ord", "fundamental", "w^2", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["value"], "w*3+1");
    assert!(v["config"]["rule"].as_str().unwrap().starts_with("cnf-peel-v1"));
}

#[test]
fn xp_tower_length() {
    let (code, v) = json(&["tower", "length", &fixture("xp.json"), "--max-alpha", "w", "--depth", "16"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["length"]["exactly"], "1");
    assert_eq!(v["result"]["plain"], "yes");
    assert!(!v["result"]["certificate"].as_array().unwrap().is_empty());
    assert_eq!(v["config"]["depth"], 16);
    assert_eq!(v["config"]["ring"], "Z");
}

#[test]
fn inline_input_and_eventual_image() {
    let (code, v) = json(&["lin", "eventual-image", r#"{"rows": [[2, 0], [0, 1]]}"#]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["lattice"]["basis"], serde_json::json!([[0, 1]]));
    let (_, w) = json(&["lin", "eventual-image", &fixture("diag_2_1.json")]);
    assert_eq!(v, w);
}

#[test]
fn meet_and_join() {
    let doc = r#"{"left": {"dim": 2, "basis": [[2, 0], [0, 1]]}, "right": {"dim": 2, "basis": [[1, 0], [0, 3]]}}"#;
    let (_, m) = json(&["lin", "meet", doc]);
    assert_eq!(m["result"]["lattice"]["basis"], serde_json::json!([[2, 0], [0, 3]]));
    let (_, j) = json(&["lin", "join", doc]);
    assert_eq!(j["result"]["lattice"]["basis"], serde_json::json!([[1, 0], [0, 1]]));
}

#[test]
fn trees_and_modules() {
    let (_, v) = json(&["tree", "rank", &fixture("tree.json")]);
    assert_eq!(v["result"]["rank"], 4);
    let (_, v) = json(&["tree", "linearize", "2", "3"]);
    assert_eq!(v["result"]["label"], "4");
    let (code, v) = json(&["mod", "length", &fixture("z_half.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["r_projective_length"]["exactly"], "1");
    assert_eq!(v["result"]["projective"], "no");
    let (code, v) = json(&["mod", "xi", &fixture("digits.json"), "--stages", "16"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["all_checks_pass"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(towerlen(&["ord", "fundamental", "w^^2", "1"]).status.code(), Some(2));
    assert_eq!(towerlen(&["lin", "hnf", "{not json"]).status.code(), Some(2));
    assert_eq!(towerlen(&["lin", "hnf", "/no/such/file.json"]).status.code(), Some(2));
    assert_eq!(towerlen(&["bogus"]).status.code(), Some(2));
    assert_eq!(towerlen(&["verify", "nope"]).status.code(), Some(2));
    // Index trees start at 1.
    assert_eq!(towerlen(&["tree", "index", "0"]).status.code(), Some(3));
    // A finite free module is not coreduced.
    let finite = r#"{"stages": [], "tail": {"kind": "constant", "rank": 1, "transition": {"rows": [[1]]}}}"#;
    assert_eq!(towerlen(&["mod", "sigma-partial", finite]).status.code(), Some(3));
    // The trees suite carries a failing check.
    assert_eq!(towerlen(&["verify", "trees", "--json"]).status.code(), Some(1));
}

#[test]
fn require_exact_turns_unknown_into_exit_four() {
    let bounded = r#"{"tail": {"kind": "constant", "dim": 1, "bond": {"rows": [[3]]}}}"#;
    assert_eq!(towerlen(&["tower", "length", bounded, "--max-alpha", "0", "--require-exact"]).status.code(), Some(4));
    assert_eq!(towerlen(&["tower", "length", bounded, "--max-alpha", "0"]).status.code(), Some(0));
    assert_eq!(towerlen(&["tower", "length", bounded, "--require-exact"]).status.code(), Some(0));
}

#[test]
fn table_and_json_formats() {
    let out = towerlen(&["ord", "compare", "w+1", "w*2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(serde_json::from_str::<Value>(&text).is_ok(), "piped output defaults to JSON");
    let out = Command::new(env!("CARGO_BIN_EXE_towerlen"))
        .args(["ord", "compare", "w+1", "w*2"])
        .env("TOWERLEN_FORMAT", "table")
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("order") && l.trim_end().ends_with('<')));
}

#[test]
fn verify_is_deterministic() {
    for suite in ["ordinals", "towers", "fishbone", "xi"] {
        let a = towerlen(&["verify", suite, "--seed", "7", "--json"]);
        let b = towerlen(&["verify", suite, "--seed", "7", "--json"]);
        assert_eq!(a.status.code(), Some(0), "{suite}");
        assert_eq!(a.stdout, b.stdout, "{suite}");
    }
    let (code, v) = json(&["verify", "fishbone", "--alpha", "3", "--depth", "8", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["pass"], true);
}
