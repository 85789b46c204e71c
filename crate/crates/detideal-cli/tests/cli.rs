use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const DET2: &str =
    r#"{"terms":[{"coef":"1","mono":{"x[1,1]":1,"x[2,2]":1}},{"coef":"-1","mono":{"x[1,2]":1,"x[2,1]":1}}]}"#;

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_detideal"))
        .args(args)
        .env_remove("DETIDEAL_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn ideal_member_det2() {
    let v = json_of(&run(&["ideal-member", "--r", "2"], DET2));
    assert_eq!(v, serde_json::json!({"member": true, "min_width": 2}));
}

#[test]
fn refute_then_verify() {
    let refutation = run(&["ips", "refute", "--n", "2"], "");
    let text = String::from_utf8(refutation.stdout).unwrap();
    assert_eq!(json_of(&run(&["ips", "verify"], &text))["verified"], true);
    let v = json_of(&run(&["ips", "extract"], &text));
    assert_eq!(v["min_width"], 2);
}

#[test]
fn corank_one_refutation_extracts() {
    let text = String::from_utf8(run(&["ips", "refute", "--n", "3", "--r", "2"], "").stdout).unwrap();
    assert_eq!(json_of(&run(&["ips", "verify"], &text))["verified"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["straighten"], "{not json").status.code(), Some(2));
    assert_eq!(run(&["pit", "condenser", "--n", "3", "--r", "2", "--omega", "-1"], "").status.code(), Some(2));
    assert_eq!(run(&["reduce", "--r", "3"], DET2).status.code(), Some(3));
    assert_eq!(run(&["reduce", "--r", "2", "--budget", "1"], DET2).status.code(), Some(4));
    assert_eq!(run(&["ips", "verify"], r#"{"system":{"axioms":[]}}"#).status.code(), Some(2));
}

#[test]
fn seeded_output_is_byte_identical() {
    let a = run(&["--seed", "9", "abp", "random", "--n", "5"], "");
    let b = run(&["abp", "random", "--n", "5", "--seed", "9"], "");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["--seed", "10", "abp", "random", "--n", "5"], "");
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn derivative_dim_and_straighten() {
    let v = json_of(&run(&["derivative-dim"], DET2));
    assert_eq!(v["dim"], 6);
    let v = json_of(&run(&["derivative-dim", "--order", "1"], DET2));
    assert_eq!(v["dim"], 5);
    let v = json_of(&run(&["straighten"], DET2));
    assert_eq!(v["terms"].as_array().unwrap().len(), 1);
}

#[test]
fn pfaffian_eval_and_compose() {
    // Pf of [[0,a,b,c],...] is x12 x34 − x13 x24 + x14 x23
    let v = json_of(&run(&["pfaffian", "eval"], r#"{"size":4,"entries":[[1,2,"1"],[3,4,"2"],[1,3,"5"]]}"#));
    assert_eq!(v["pfaffian"]["terms"][0]["coef"]["0"], "2/1");
    let pf4 = json_of(&run(
        &["pfaffian", "eval"],
        r#"{"size":4,"entries":[
        [1,2,{"terms":[{"coef":"1","mono":{"x[1,2]":1}}]}],[1,3,{"terms":[{"coef":"1","mono":{"x[1,3]":1}}]}],
        [1,4,{"terms":[{"coef":"1","mono":{"x[1,4]":1}}]}],[2,3,{"terms":[{"coef":"1","mono":{"x[2,3]":1}}]}],
        [2,4,{"terms":[{"coef":"1","mono":{"x[2,4]":1}}]}],[3,4,{"terms":[{"coef":"1","mono":{"x[3,4]":1}}]}]]}"#,
    ));
    let f = pf4["pfaffian"].to_string();
    let c = json_of(&run(&["pfaffian", "compose", "--r", "2", "--order", "2"], &f));
    assert!(c["gates"].as_u64().unwrap() > 0);
}

#[test]
fn pit_commands() {
    let g = json_of(&run(&["pit", "gen", "--n", "2", "--r", "1"], ""));
    assert_eq!(g["seed_length"], 4);
    let rec = json_of(&run(&["pit", "recursive", "--n", "16", "--k", "2", "--schedule", "2,2"], ""));
    assert_eq!(rec["degree"], 4);
    let c = json_of(&run(&["pit", "condenser", "--n", "3", "--r", "2"], ""));
    assert_eq!(c["matrices"].as_array().unwrap().len(), 5);
    let a = json_of(&run(&["pit", "apply", "--r", "2"], DET2));
    assert_eq!(a["report"]["agree"], true);
}
