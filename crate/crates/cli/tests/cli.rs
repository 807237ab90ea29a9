use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn qpmut(args: &[&str], stdin: Option<&str>, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qpmut"));
    cmd.args(args).env_remove("QPMUT_TRUNCATION").env_remove("QPMUT_SERVER");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    let mut child = cmd.spawn().unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn json_err(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap()
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

fn a3() -> Value {
    json!({"vertices": [1, 2, 3], "arrows": [{"id": "a", "source": 1, "target": 2}, {"id": "b", "source": 2, "target": 3}]})
}

fn three_cycle() -> Value {
    json!({"vertices": [1, 2, 3], "arrows": [
        {"id": "a", "source": 1, "target": 2}, {"id": "b", "source": 2, "target": 3}, {"id": "c", "source": 3, "target": 1}],
        "potential": [{"coeff": "1", "cycle": ["a", "b", "c"]}]})
}

#[test]
fn stdin_and_file_agree() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "a3.json", &a3());
    let from_file = qpmut(&["mutate", "--vertex", "2", &f], None, &[]);
    let from_stdin = qpmut(&["mutate", "--vertex", "2"], Some(&a3().to_string()), &[]);
    let dash = qpmut(&["mutate", "--vertex", "2", "-"], Some(&a3().to_string()), &[]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, from_stdin.stdout);
    assert_eq!(from_file.stdout, dash.stdout);
    assert_eq!(json_out(&from_file)["arrows"].as_array().unwrap().len(), 3);
}

#[test]
fn input_errors_exit_one() {
    let usage = qpmut(&["frobnicate"], None, &[]);
    assert_eq!(usage.status.code(), Some(1));
    assert_eq!(json_err(&usage)["error"], "Usage");

    let missing = qpmut(&["normalize", "/definitely/not/here.json"], None, &[]);
    assert_eq!(missing.status.code(), Some(1));
    assert_eq!(json_err(&missing)["error"], "Io");

    let garbage = qpmut(&["normalize"], Some("{"), &[]);
    assert_eq!(garbage.status.code(), Some(1));
    assert_eq!(json_err(&garbage)["error"], "Parse");
    assert!(garbage.stdout.is_empty());

    let help = qpmut(&["--help"], None, &[]);
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn preconditions_exit_two() {
    let unknown = qpmut(&["mutate", "--vertex", "9"], Some(&a3().to_string()), &[]);
    assert_eq!(unknown.status.code(), Some(2));
    assert_eq!(json_err(&unknown)["error"], "UnknownVertex");

    let two_cycle = json!({"vertices": [1, 2, 3], "arrows": [
        {"id": "a", "source": 1, "target": 2}, {"id": "b", "source": 2, "target": 1}, {"id": "c", "source": 2, "target": 3}]});
    let blocked = qpmut(&["mutate", "--vertex", "2"], Some(&two_cycle.to_string()), &[]);
    assert_eq!(blocked.status.code(), Some(2));
    assert_eq!(json_err(&blocked)["error"], "LoopOrTwoCyclePresent");
}

#[test]
fn budget_exhaustion_exits_three() {
    let dense = json!({"vertices": [1, 2], "arrows": [
        {"id": "a", "source": 1, "target": 2}, {"id": "b", "source": 1, "target": 2},
        {"id": "c", "source": 2, "target": 1}, {"id": "d", "source": 2, "target": 1}]});
    let out = qpmut(&["jacobian-dim", "--bound", "30"], Some(&dense.to_string()), &[]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json_err(&out)["error"], "ResourceLimit");
}

#[test]
fn truncation_from_flag_and_environment() {
    let input = three_cycle().to_string();
    let plain = json_out(&qpmut(&["normalize"], Some(&input), &[]));
    assert_eq!(plain["truncation"], 12);
    assert!(plain.get("truncated").is_none());

    for out in [
        qpmut(&["--truncation", "2", "normalize"], Some(&input), &[]),
        qpmut(&["normalize"], Some(&input), &[("QPMUT_TRUNCATION", "2")]),
    ] {
        let v = json_out(&out);
        assert_eq!(v["truncation"], 2);
        assert_eq!(v["potential"], json!([]));
        assert_eq!(v["truncated"], true);
    }

    // an explicit order, from the flag or the environment, beats the document's own
    let mut pinned = three_cycle();
    pinned["truncation"] = json!(5);
    assert_eq!(json_out(&qpmut(&["normalize"], Some(&pinned.to_string()), &[]))["truncation"], 5);
    let env = json_out(&qpmut(&["normalize"], Some(&pinned.to_string()), &[("QPMUT_TRUNCATION", "4")]));
    assert_eq!(env["truncation"], 4);
    let flag = json_out(&qpmut(&["--truncation", "3", "normalize"], Some(&pinned.to_string()), &[]));
    assert_eq!(flag["truncation"], 3);

    // the flag is harmless on documents without a potential
    let fan = json!({
        "sides": [{"id": "1", "kind": "arc"}, {"id": "b1", "kind": "boundary"}, {"id": "b2", "kind": "boundary"},
                  {"id": "b3", "kind": "boundary"}, {"id": "b4", "kind": "boundary"}],
        "triangles": [["1", "b2", "b1"], ["b4", "b3", "1"]]
    });
    let tri = qpmut(&["--truncation", "4", "surface-quiver"], Some(&fan.to_string()), &[]);
    assert_eq!(tri.status.code(), Some(0), "{}", String::from_utf8_lossy(&tri.stderr));
}

#[test]
fn truncated_output_reads_back() {
    let once = qpmut(&["--truncation", "2", "normalize"], Some(&three_cycle().to_string()), &[]);
    let twice = qpmut(&["normalize"], Some(std::str::from_utf8(&once.stdout).unwrap()), &[]);
    assert_eq!(twice.status.code(), Some(0));
    assert_eq!(once.stdout, twice.stdout);
}

#[test]
fn mutation_class_resumes_from_ndjson() {
    let dir = tempfile::tempdir().unwrap();
    let out = qpmut(&["mutation-class", "--ndjson"], Some(&a3().to_string()), &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    let saved = dir.path().join("a3.ndjson");
    std::fs::write(&saved, &text).unwrap();
    let resumed = qpmut(&["mutation-class", "--ndjson", "--resume", saved.to_str().unwrap()], None, &[]);
    assert_eq!(resumed.status.code(), Some(0));
    let mut before: Vec<&str> = text.lines().collect();
    let after_text = String::from_utf8(resumed.stdout).unwrap();
    let mut after: Vec<&str> = after_text.lines().collect();
    before.sort();
    after.sort();
    assert_eq!(before, after);
}
