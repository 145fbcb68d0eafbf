use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_treenorm"))
}

fn write(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("treenorm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, Value, Output) {
    let out = bin().args(args).output().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v, out)
}

const EXPOSED: &str = r#"{"space":"JH","entries":[
  {"node":[],"value":"4/5"},{"node":[0],"value":"1/5"},{"node":[1],"value":"-1/5"},
  {"node":[0,0],"value":"-1/5"},{"node":[0,1],"value":"-1/5"},{"node":[1,0],"value":"-1/5"},{"node":[1,1],"value":"1/5"}]}"#;

#[test]
fn norm_of_the_exposed_point() {
    let p = write("exposed.json", EXPOSED);
    let (code, v, _) = run(&["norm", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["value"], "1");
    assert_eq!(v["witness"], serde_json::json!([{"top": [], "bottom": [0]}]));
}

#[test]
fn norm_of_the_empty_vector() {
    let p = write("empty.json", r#"{"entries":[]}"#);
    let (code, v, _) = run(&["norm", p.to_str().unwrap(), "--space", "JH_INF"]);
    assert_eq!(code, 0);
    assert_eq!((&v["value"], &v["witness"]), (&Value::from("0"), &serde_json::json!([])));
}

#[test]
fn diameter_with_the_five_thirds_scenario() {
    let p = write("jhinf.json", r#"{"space":"JH_INF","entries":[{"node":[],"value":"3/4"},{"node":[1],"value":"1/4"}]}"#);
    let (code, v, _) = run(&["diameter", p.to_str().unwrap(), "--alpha", "1/10", "--scenario", "JHINF_53"]);
    assert_eq!(code, 0);
    assert_eq!(v["upper"], "5/3");
    assert_eq!(v["scenario"], "JHINF_53");
    assert!(v["witness_pair"].is_array());
}

#[test]
fn scenario_constraint_violation_is_a_validation_error() {
    let (code, v, _) = run(&["diameter", "--scenario", "JH_ZERO", "--epsilon", "1/5", "--alpha", "1/4"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "constraint");
    assert!(v["error"]["message"].as_str().unwrap().contains("min{1−4ε, ε}"));
}

#[test]
fn malformed_input_exits_2_with_a_json_error() {
    let p = write("bad.json", r#"{"entries":[{"node":[1],"value":"one"}]}"#);
    let (code, v, _) = run(&["norm", p.to_str().unwrap(), "--space", "JH_INF"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "parse");
    let (code, v, _) = run(&["no-such-command"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "parse");
}

#[test]
fn dual_norm_and_certificates() {
    let g = write(
        "g.json",
        r#"{"class":"general","terms":[{"coeff":"1","top":[1],"bottom":[1]},{"coeff":"-1","top":[2],"bottom":[2,1]}]}"#,
    );
    let (code, v, _) = run(&["dual-norm", g.to_str().unwrap(), "--space", "JH_INF"]);
    assert_eq!(code, 0);
    assert_eq!((&v["lower"], &v["upper"]), (&Value::from("1"), &Value::from("1")));

    let s = write(
        "sd2p.json",
        r#"{"space":"JH","slices":[{"functional":{"class":"signed_family","terms":[{"coeff":"1","top":[],"bottom":[]}]},"alpha":"3/10","weight":"1"}]}"#,
    );
    let (code, v, _) = run(&["certify", "sd2p", s.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!((&v["cert_v"], &v["distance"], &v["m"]), (&Value::from(1), &Value::from("2"), &Value::from(10)));

    let c = write("ccw.json", r#"{"slices":[{"x":{"entries":[{"node":[1],"value":"1"}]},"epsilon":"1/2","weight":"1"}]}"#);
    let (code, v, _) = run(&["certify", "ccw", c.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!((&v["lower"], &v["upper"]), (&Value::from("2"), &Value::from("2")));

    let o = write(
        "oct.json",
        r#"{"space":"JH","basis":[{"entries":[{"node":[],"value":"1"}]}],"candidate":{"entries":[{"node":[0],"value":"1"}]},
           "mesh":{"lambdas":["1","-1","1/2","-1/2"],"coeffs":["1","-1","1/2","-1/2"]}}"#,
    );
    let (code, v, _) = run(&["certify", "octahedral", o.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["deficit"], serde_json::json!({"lo": "1/2", "hi": "1/2"}));

    let (code, v, _) = run(&["certify", "l1", "1", "-2", "3"]);
    assert_eq!(code, 0);
    assert_eq!((&v["value"], &v["equal"]), (&Value::from("6"), &Value::from(true)));

    let x = write("half.json", r#"{"space":"JH","entries":[{"node":[],"value":"1/2"}]}"#);
    let (code, v, _) = run(&["certify", "extend", x.to_str().unwrap(), "--n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["norm"], "1");
    let bare = write("bare.json", r#"{"entries":[{"node":[],"value":"1/2"}]}"#);
    let (code, v, _) = run(&["certify", "extend", bare.to_str().unwrap(), "--n", "2", "--space", "JT_INF"]);
    assert_eq!((code, &v["error"]["kind"]), (2, &Value::from("unsupported")));
}

#[test]
fn output_is_byte_identical_across_runs_and_worker_counts() {
    let p = write("jhinf2.json", r#"{"space":"JH_INF","entries":[{"node":[1],"value":"3/4"},{"node":[1,0],"value":"1/4"}]}"#);
    let args = ["diameter", p.to_str().unwrap(), "--alpha", "1/4"];
    let a = bin().args(args).output().unwrap().stdout;
    let b = bin().args(args).args(["--parallel", "2"]).output().unwrap().stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let cfg = write("cfg.json", r#"{"space":"JH_INF","format":"tsv"}"#);
    let p = write("plain.json", r#"{"entries":[{"node":[1],"value":"-2"}]}"#);
    let out = bin().args(["norm", p.to_str().unwrap(), "--config", cfg.to_str().unwrap()]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "value\t2"), "{text}");
    let (code, v, _) = run(&["norm", p.to_str().unwrap(), "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert_eq!((code, &v["value"]), (0, &Value::from("2")));
    let bad = write("badcfg.json", r#"{"colour":"red"}"#);
    let (code, _, _) = run(&["norm", p.to_str().unwrap(), "--config", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn verify_runs_a_suite() {
    let (code, v, _) = run(&["verify", "--suite", "certs"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 5);
    let (code, _, _) = run(&["verify", "--suite", "everything"]);
    assert_eq!(code, 2);
}
