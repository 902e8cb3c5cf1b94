//! End-to-end runs of the `repairscore` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_repairscore"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn jsonl(path: &Path) -> Vec<Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn write_lines(dir: &TempDir, name: &str, rows: &[Value]) -> PathBuf {
    let body: String = rows.iter().map(|r| format!("{r}\n")).collect();
    write(dir, name, &body)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn raw_pairs(repos: usize, per_repo: usize) -> Vec<Value> {
    let mut rows = Vec::new();
    for r in 0..repos {
        for k in 0..per_repo {
            rows.push(json!({
                "id": format!("s{r}-{k}"),
                "repo": format!("repo{r}"),
                "vulnerable_fn": format!("int f{k}(int i) {{\n    return t[i];\n}}\n"),
                "fixed_fn": format!("int f{k}(int i) {{\n    if (i >= {r})\n        return 0;\n    return t[i];\n}}\n"),
            }));
        }
    }
    rows
}

fn built_dataset(dir: &TempDir, repos: usize, per_repo: usize) -> PathBuf {
    let raw = write_lines(dir, "raw.jsonl", &raw_pairs(repos, per_repo));
    let out = dir.path().join("samples.jsonl");
    let o = run(&["build", "--input", s(&raw), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn score_identical_files() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "a.c", "int f(int x) { return x + 1; }\n");
    let v = stdout_json(&run(&["score", "--candidate", s(&f), "--oracle", s(&f)]));
    assert_eq!(v["reward"], 1.0);
    assert_eq!(v["codebleu"], 1.0);
}

#[test]
fn missing_file_is_an_io_error() {
    let o = run(&["score", "--candidate", "/nonexistent/a.c", "--oracle", "/nonexistent/b.c"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_oracle_is_invalid_input() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.c", "x = 1;");
    let e = write(&dir, "e.c", "  \n");
    let o = run(&["score", "--candidate", s(&c), "--oracle", s(&e)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unknown_option_is_invalid_input() {
    assert_eq!(run(&["score", "--bogus"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn set_override_changes_weights() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.c", "a = b + c;");
    let o = write(&dir, "o.c", "x = y + z;");
    let v = stdout_json(&run(&[
        "--set", "codebleu_weights=0,0,1,0",
        "score", "--candidate", s(&c), "--oracle", s(&o),
    ]));
    assert_eq!(v["codebleu"], v["sim_ast"]);
    let bad = run(&["--set", "no_such_key=1", "score", "--candidate", s(&c), "--oracle", s(&o)]);
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn eval_rejects_unknown_ids() {
    let dir = TempDir::new().unwrap();
    let data = built_dataset(&dir, 3, 1);
    let preds = write_lines(&dir, "p.jsonl", &[json!({"id": "ghost", "prediction": "x;"})]);
    let o = run(&["eval", "--dataset", s(&data), "--predictions", s(&preds)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ghost"));
}

#[test]
fn eval_reports_strata() {
    let dir = TempDir::new().unwrap();
    let data = built_dataset(&dir, 3, 1);
    let samples = jsonl(&data);
    let preds: Vec<Value> = samples
        .iter()
        .map(|r| json!({"id": r["id"], "prediction": r["fixed_fn"]}))
        .collect();
    let preds = write_lines(&dir, "p.jsonl", &preds);
    let v = stdout_json(&run(&["eval", "--dataset", s(&data), "--predictions", s(&preds)]));
    assert_eq!(v["per_sample"].as_array().unwrap().len(), 3);
    assert_eq!(v["aggregates"]["overall"]["exact_match_rate"], 1.0);
    assert_eq!(v["aggregates"]["by_cwe"]["unknown"]["count"], 3);
}

#[test]
fn split_ten_equal_repos() {
    let dir = TempDir::new().unwrap();
    let data = built_dataset(&dir, 10, 2);
    let v = stdout_json(&run(&["split", "--dataset", s(&data)]));
    let sizes: Vec<usize> = ["train", "val", "test"]
        .iter()
        .map(|k| v[k].as_array().unwrap().len())
        .collect();
    assert_eq!(sizes, [16, 2, 2]);
    assert_eq!(v["repo_assignment"].as_object().unwrap().len(), 10);
}

#[test]
fn build_drops_duplicates() {
    let dir = TempDir::new().unwrap();
    let mut rows = raw_pairs(3, 1);
    let mut copy = rows[0].clone();
    copy["id"] = json!("copy");
    rows.push(copy);
    let raw = write_lines(&dir, "raw.jsonl", &rows);
    let out = dir.path().join("samples.jsonl");
    assert!(run(&["build", "--input", s(&raw), "--out", s(&out)]).status.success());
    let samples = jsonl(&out);
    assert_eq!(samples.len(), 3);
    assert!(samples[0]["marked_fn"].as_str().unwrap().contains("<vul_start>"));
}

#[test]
fn grpo_advantages_for_two_rewards() {
    let o = run_stdin(&["grpo", "advantages", "--input", "-"], "{\"prompt_id\":\"p\",\"rewards\":[1,0]}\n");
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let adv: Vec<f64> = v["advantages"].as_array().unwrap().iter().map(|a| a.as_f64().unwrap()).collect();
    assert!((adv[0] - 0.5 / 0.5001).abs() < 1e-12);
    assert!((adv[1] + 0.5 / 0.5001).abs() < 1e-12);
}

#[test]
fn grpo_objective_reports_loss() {
    let line = json!({"prompt_id": "p", "rewards": [1.0, 0.0], "logp_new": [-1.0, -2.0], "logp_old": [-1.0, -2.0]});
    let o = run_stdin(&["grpo", "objective", "--input", "-"], &format!("{line}\n"));
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["kl_estimate"], 0.0);
    assert!(v["loss"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn filter_partitions_responses() {
    let dir = TempDir::new().unwrap();
    let oracle = "if (p == NULL) return -1; use(p);";
    let rows = vec![
        json!({"id": "good", "response": format!("<reason>null</reason><patch>{oracle}</patch>"), "oracle": oracle}),
        json!({"id": "far", "response": "<reason>x</reason><patch>return 0;</patch>", "oracle": oracle}),
        json!({"id": "broken", "response": "<reason>x</reason>", "oracle": oracle}),
    ];
    let input = write_lines(&dir, "in.jsonl", &rows);
    let kept = dir.path().join("kept.jsonl");
    let rej = dir.path().join("rej.jsonl");
    let v = stdout_json(&run(&["filter", "--input", s(&input), "--kept", s(&kept), "--rejections", s(&rej)]));
    assert_eq!(v["total"], 3);
    assert_eq!(v["kept"], 1);
    let kept = jsonl(&kept);
    let rej = jsonl(&rej);
    assert_eq!(kept[0]["id"], "good");
    let ids: Vec<&str> = rej.iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["far", "broken"]);
    assert_eq!(rej[1]["kind"], "MissingPatch");
}

#[test]
fn curriculum_plan_is_cumulative() {
    let dir = TempDir::new().unwrap();
    let data = built_dataset(&dir, 3, 2);
    let v = stdout_json(&run(&["curriculum", "plan", "--dataset", s(&data)]));
    let stages = v["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 3);
    assert_eq!(stages[2]["ids"].as_array().unwrap().len(), 6);
}

#[test]
fn parse_dumps_tree_and_dfg() {
    let o = run_stdin(&["parse", "--input", "-"], "int f(int x) { int y = x; return y; }");
    let v = stdout_json(&o);
    assert_eq!(v["failed"], false);
    assert!(v["tokens"].as_array().unwrap().len() > 10);
    assert_eq!(v["dfg"]["variables"], json!(["x", "y"]));
    assert_eq!(v["dfg"]["graph"]["edges"], json!([[0, 1]]));
}

#[test]
fn serve_over_stdio() {
    let input = concat!(
        "{\"id\":1,\"candidate\":\"x = 1;\",\"oracle\":\"x = 1;\"}\n",
        "garbage\n",
        "{\"id\":2,\"candidate\":\"y;\",\"oracle\":\"x = 1;\"}\n",
    );
    let o = run_stdin(&["serve"], input);
    assert!(o.status.success());
    let lines: Vec<Value> = String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["reward"], 1.0);
    assert_eq!(lines[1]["id"], Value::Null);
    assert_eq!(lines[2]["id"], 2);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let data = built_dataset(&dir, 5, 3);
    let a = run(&["split", "--dataset", s(&data)]);
    let b = run(&["split", "--dataset", s(&data)]);
    assert_eq!(a.stdout, b.stdout);
    let first = fs::read(&data).unwrap();
    built_dataset(&dir, 5, 3);
    assert_eq!(first, fs::read(&data).unwrap());
}
