use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn cheese(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cheese"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn build_road_runner_emits_depth_discs_and_tail() {
    let out = cheese(&["build", "road_runner", "--m", "2", "--depth", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["finite"].as_array().unwrap().len(), 20);
    assert_eq!(v["parametric"]["start"], 21);
    assert_eq!(v["finite"][0]["cx"].as_str().unwrap().parse::<f64>().unwrap(), 0.5);
}

#[test]
fn empty_family_browder_is_one() {
    let out = cheese(&["browder", "--m", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["realized_sum"].as_str().unwrap().parse::<f64>().unwrap(), 1.0);
}

#[test]
fn divergent_order_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rr.json");
    let p = path.to_str().unwrap();
    assert_eq!(cheese(&["build", "road_runner", "--m", "2", "-o", p]).status.code(), Some(0));
    assert_eq!(cheese(&["browder", "--family", p, "--m", "1"]).status.code(), Some(0));
    assert_eq!(cheese(&["browder", "--family", p, "--m", "2"]).status.code(), Some(1));
}

#[test]
fn verify_sqrt_disc_passes() {
    let out = cheese(&["verify", "sqrt_disc", "--trials", "100", "--seed", "7", "--samples", "20000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v.as_array().unwrap().len(), 100);
    assert!(v.as_array().unwrap().iter().all(|c| c["verdict"] == "pass" && c["seed"] == 7));
}

#[test]
fn verify_is_reproducible_with_pinned_timestamp() {
    let args = ["verify", "infinite_order", "--timestamp", "2000-01-01T00:00:00Z"];
    let a = cheese(&args);
    let b = cheese(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn malformed_family_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"finite": [{"cx": 0.5, "cy": 0, "r": 0.1}, {"cx": 0.2, "cy": 0}]}"#).unwrap();
    let out = cheese(&["render", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("finite[1]"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cheese(&["--precision", "40", "browder", "--m", "1"]).status.code(), Some(2));
    assert_eq!(cheese(&["verify", "no_such_suite"]).status.code(), Some(2));
    assert_eq!(cheese(&["build", "road_runner"]).status.code(), Some(2));
    assert_eq!(cheese(&["browder", "--m", "1", "--format", "svg"]).status.code(), Some(2));
    assert_eq!(cheese(&["browder", "--m", "1", "--point", "2,0"]).status.code(), Some(2));
}

#[test]
fn sqrt_then_render() {
    let dir = tempfile::tempdir().unwrap();
    let seed = dir.path().join("seed.json");
    let root = dir.path().join("root.json");
    let svg = dir.path().join("root.svg");
    assert_eq!(cheese(&["build", "toy_seed", "-o", seed.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(
        cheese(&["sqrt", seed.to_str().unwrap(), "-o", root.to_str().unwrap()]).status.code(),
        Some(0)
    );
    let root_json: Value = serde_json::from_str(&fs::read_to_string(&root).unwrap()).unwrap();
    assert_eq!(root_json["finite"].as_array().unwrap().len(), 8);
    assert_eq!(
        cheese(&["render", root.to_str().unwrap(), "-o", svg.to_str().unwrap()]).status.code(),
        Some(0)
    );
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<?xml") || text.starts_with("<svg"));
    assert_eq!(text.matches("<circle").count(), 9);
}

#[test]
fn delta_of_simple_pole() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    // 1/(z - 2): delta_{0,3} = -1/16
    fs::write(&path, r#"{"num": [[1, 0]], "den": [[-2, 0], [1, 0]]}"#).unwrap();
    let out = cheese(&["delta", path.to_str().unwrap(), "--m", "3", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let re: f64 = text.split_whitespace().next().unwrap().parse().unwrap();
    assert_eq!(re, -0.0625);
}
