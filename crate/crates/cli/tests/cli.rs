use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coalition-core"))
}

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON report")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const TWO_PLAYER: &str = r#"{"n":2,"eta":0.0,"profit":{"type":"table","values":[0,1,1,1.5]}}"#;

#[test]
fn core_check_on_additive_game() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "add.json", r#"{"n":3,"eta":1,"profit":{"type":"additive","weights":[1,2,0.5]}}"#);
    let r = report(&run(&["core-check", &game], None));
    assert_eq!(r["verdict"], "nonempty");
    assert_eq!(r["reason"], "additive");
    assert_eq!(r["allocation"], serde_json::json!([1.0, 2.0, 0.5]));
}

#[test]
fn alcv_approx_stays_in_its_window() {
    let r = report(&run(&["alcv", "--method", "approx", "--delta", "0.05"], Some(TWO_PLAYER)));
    let v = r["value"].as_f64().unwrap();
    assert!((0.25 - 1e-9..=0.75 + 1e-9).contains(&v), "value {v}");
    assert!(r["guarantee"].as_str().unwrap().contains("eps_prime"));
}

#[test]
fn maxcut_pipeline_on_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = write(dir.path(), "k3.txt", "0 1\n1 2\n0 2\n");
    let generated = run(&["gen", "maxcut", &k3], None);
    assert!(generated.status.success());
    let r = report(&run(&["alcv", "--method", "exact", "-"], Some(&String::from_utf8(generated.stdout).unwrap())));
    assert!((r["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    let oracle = report(&run(&["oracle", "maxcut", &k3], None));
    assert_eq!(oracle["value"], 2);
}

#[test]
fn gen_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "sc.json", r#"{"universe":[1,2,3],"sets":[[1,2],[2,3],[3]]}"#);
    let out = dir.path().join("game.json");
    let status = run(&["gen", "setcover", &spec, "-o", out.to_str().unwrap()], None);
    assert!(status.status.success());
    let game: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(game["n"], 3);
    assert_eq!(game["profit"]["type"], "coverage");
}

#[test]
fn solver_and_oracle_agree() {
    for (cmd, quantity, expected) in [("rlcv", "rlcv", 0.25), ("alcv", "alcv", 0.25), ("ladv", "ladv", 0.125)] {
        let solved = report(&run(&[cmd], Some(TWO_PLAYER)));
        let brute = report(&run(&["oracle", quantity], Some(TWO_PLAYER)));
        assert!((solved["value"].as_f64().unwrap() - expected).abs() < 1e-9, "{cmd}");
        assert!((brute["value"].as_f64().unwrap() - expected).abs() < 1e-9, "{quantity}");
    }
}

#[test]
fn reports_are_reproducible_apart_from_runtime() {
    let args = ["ladv", "--method", "sgd", "--T", "2000", "--seed", "11"];
    let strip = |out: Output| {
        let mut v = report(&out);
        v.as_object_mut().unwrap().remove("runtime_ms");
        serde_json::to_string(&v).unwrap()
    };
    let a = strip(run(&args, Some(TWO_PLAYER)));
    let b = strip(run(&args, Some(TWO_PLAYER)));
    assert_eq!(a, b);
}

#[test]
fn sgd_trace_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let r = report(&run(
        &["ladv", "--method", "sgd", "--T", "50", "--trace", trace.to_str().unwrap()],
        Some(TWO_PLAYER),
    ));
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("iteration,objective,step_norm"));
    assert_eq!(text.lines().count(), 52);
    assert!(r["value"].as_f64().unwrap() >= 0.125 - 1e-9);
}

#[test]
fn spread_counts_targets() {
    let graph = r#"{"seeds":[0,1],"targets":[2],"edges":[[0,2,0.5],[1,2,0.5]]}"#;
    let r = report(&run(&["spread", "--seeds", "0,1"], Some(graph)));
    assert!((r["value"].as_f64().unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn exit_codes_follow_failure_class() {
    assert_eq!(run(&["no-such-command"], None).status.code(), Some(1));
    assert_eq!(run(&["core-check"], Some("{ not json")).status.code(), Some(2));
    let big = format!(r#"{{"n":13,"eta":0,"profit":{{"type":"additive","weights":{:?}}}}}"#, vec![1.0; 13]);
    assert_eq!(run(&["oracle", "alcv"], Some(&big)).status.code(), Some(3));
    assert_eq!(run(&["adversarial"], Some(TWO_PLAYER)).status.code(), Some(1));
}
