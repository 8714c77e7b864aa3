use std::path::PathBuf;
use std::process::{Command, Output};

use erdos::textfmt::parse_bistochastic;
use erdos::{BistochasticMatrix, Rational};
use serde_json::Value;

fn erdos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_erdos")).args(args).output().expect("binary runs")
}

fn write_tmp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("erdos-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

fn matrix_from_json(v: &Value) -> BistochasticMatrix {
    let rows = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_array().unwrap().iter().map(|x| x.as_str().unwrap().parse::<Rational>().unwrap()).collect())
        .collect();
    BistochasticMatrix::from_rows(rows).unwrap()
}

/// Every run of non-comment lines in a table output parses as a matrix
/// equal to the one expected.
fn table_blocks(text: &str) -> Vec<BistochasticMatrix> {
    let mut blocks = Vec::new();
    let mut cur = String::new();
    for line in text.lines() {
        if line.starts_with('#') || line.trim().is_empty() {
            if !cur.is_empty() {
                blocks.push(parse_bistochastic(&cur).unwrap());
                cur.clear();
            }
        } else {
            cur.push_str(line);
            cur.push('\n');
        }
    }
    if !cur.is_empty() {
        blocks.push(parse_bistochastic(&cur).unwrap());
    }
    blocks
}

const R: &str = "# R\n3/5 0 2/5\n0 3/5 2/5\n2/5 2/5 1/5\n";

#[test]
fn verify_r_is_erdos() {
    let f = write_tmp("r.txt", R);
    let o = erdos(&["verify", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("# frob_sq: 7/5"));
    assert!(text.contains("# maxtr: 7/5"));
    assert!(text.contains("# verdict: erdos"));
    assert_eq!(table_blocks(&text), vec![parse_bistochastic(R).unwrap()]);

    let j = json(&erdos(&["verify", f.to_str().unwrap(), "--format", "json"]));
    assert_eq!(j["command"], "verify");
    assert_eq!(j["n"], 3);
    assert_eq!(j["payload"]["frob_sq"], "7/5");
    assert_eq!(j["payload"]["maxtr"], "7/5");
    assert!(j["tool_version"].is_string());
}

#[test]
fn verify_half_identity_half_uniform_is_not() {
    let f = write_tmp("h.txt", "2/3 1/6 1/6\n1/6 2/3 1/6\n1/6 1/6 2/3\n");
    let o = erdos(&["verify", f.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let j = json(&o);
    assert_eq!(j["payload"]["delta"], "1/2");
    assert_eq!(j["payload"]["is_erdos"], false);
}

#[test]
fn verify_reports_bad_rows() {
    let f = write_tmp("bad.txt", "1/2 2/5 0\n1/2 1/2 0\n0 1/10 9/10\n");
    let o = erdos(&["verify", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("row 1 sums to 9/10"), "{err}");

    let f = write_tmp("junk.txt", "1 0\n0 one\n");
    let o = erdos(&["verify", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 2, entry 2"));

    let o = erdos(&["verify", "/nonexistent/matrix.txt"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn uniform_witnesses_are_capped() {
    let row = vec!["1/5"; 5].join(" ");
    let f = write_tmp("j5.txt", &format!("{row}\n").repeat(5));
    let j = json(&erdos(&["verify", f.to_str().unwrap(), "--format", "json"]));
    assert_eq!(j["payload"]["witness_count"], 120);
    assert_eq!(j["payload"]["witnesses"].as_array().unwrap().len(), 100);
}

#[test]
fn usage_errors() {
    assert_eq!(erdos(&["enumerate", "-n", "7"]).status.code(), Some(2));
    assert_eq!(erdos(&["enumerate", "-n", "3", "--max-support", "6"]).status.code(), Some(2));
    assert_eq!(erdos(&["enumerate", "-n", "3", "--budget", "soon"]).status.code(), Some(2));
    assert_eq!(erdos(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(erdos(&["omega2", "1/3"]).status.code(), Some(2));
    assert_eq!(erdos(&["omega2", "-1/8"]).status.code(), Some(2));
}

#[test]
fn enumerate_small() {
    let o = erdos(&["enumerate", "-n", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let j = json(&o);
    let classes = j["payload"]["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 6);
    for c in classes {
        for key in ["matrix", "support", "weights", "value"] {
            assert!(c.get(key).is_some(), "missing {key}");
        }
        let m = matrix_from_json(&c["matrix"]);
        assert!(erdos::is_erdos(&m).is_erdos);
    }
    let text = stdout(&erdos(&["enumerate", "-n", "2"]));
    assert_eq!(table_blocks(&text).len(), 2);

    let env_run = Command::new(env!("CARGO_BIN_EXE_erdos"))
        .args(["enumerate", "-n", "3", "--format", "json"])
        .env("ERDOS_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(json(&env_run)["payload"]["workers"], 2);
    assert_eq!(json(&env_run)["payload"]["classes"], j["payload"]["classes"]);
}

#[test]
fn truncated_enumeration_exits_4() {
    let o = erdos(&["enumerate", "-n", "4", "--budget", "0s", "--format", "json"]);
    assert_eq!(o.status.code(), Some(4));
    let j = json(&o);
    assert_eq!(j["payload"]["complete"], false);
    assert!(!j["payload"]["frontier"].as_array().unwrap().is_empty());
}

#[test]
fn decompose_outputs() {
    let j3 = write_tmp("j3.txt", "1/3 1/3 1/3\n1/3 1/3 1/3\n1/3 1/3 1/3\n");
    let j = json(&erdos(&["decompose", j3.to_str().unwrap(), "--reduce", "linear", "--format", "json"]));
    assert!(j["payload"]["term_count"].as_u64().unwrap() <= 5);
    assert_eq!(j["payload"]["linearly_independent"], true);

    let p = write_tmp("p.txt", "0 1 0\n0 0 1\n1 0 0\n");
    let j = json(&erdos(&["decompose", p.to_str().unwrap(), "--format", "json"]));
    assert_eq!(j["payload"]["term_count"], 1);
    assert_eq!(j["payload"]["terms"][0]["coef"], "1");
    assert_eq!(j["payload"]["terms"][0]["perm"], serde_json::json!([2, 3, 1]));

    let s = write_tmp("s.txt", "0 1/2 1/2\n1/2 1/4 1/4\n1/2 1/4 1/4\n");
    let o = erdos(&["decompose", s.to_str().unwrap(), "--reduce", "linear"]);
    let text = stdout(&o);
    assert!(text.contains("# terms: 4"), "{text}");
    assert!(text.contains("# linearly_independent: true"));
    assert_eq!(table_blocks(&text), vec![parse_bistochastic("0 1/2 1/2\n1/2 1/4 1/4\n1/2 1/4 1/4\n").unwrap()]);
}

#[test]
fn misc_commands() {
    let j = json(&erdos(&["bound", "-n", "3", "--format", "json"]));
    assert_eq!(j["payload"]["total"], "62");
    assert_eq!(j["payload"]["equivalence"], "31");

    let o = erdos(&["family", "-n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let blocks = table_blocks(&stdout(&o));
    assert_eq!(blocks.len(), 3);
    assert!(blocks.iter().all(|m| erdos::is_erdos(m).is_erdos));

    let j = json(&erdos(&["omega2", "0", "--format", "json"]));
    assert_eq!(j["payload"]["values"], serde_json::json!(["0", "1/2", "1"]));
    assert_eq!(j["n"], 2);

    let o = erdos(&["maxdelta", "-n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("# delta: 3/4"));

    let r = write_tmp("r2.txt", R);
    let text = stdout(&erdos(&["canon", r.to_str().unwrap()]));
    let c = table_blocks(&text);
    assert_eq!(c.len(), 1);
    assert_eq!(c[0], erdos::canonical_form(&parse_bistochastic(R).unwrap()).unwrap());
}

#[test]
fn approx_adds_but_never_replaces() {
    let f = write_tmp("r3.txt", R);
    let text = stdout(&erdos(&["verify", f.to_str().unwrap(), "--approx"]));
    assert!(text.contains("# frob_sq: 7/5  (~1.4)"));
    assert_eq!(table_blocks(&text), vec![parse_bistochastic(R).unwrap()]);
}
