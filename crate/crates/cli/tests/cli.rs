use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn kladder(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kladder"));
    cmd.args(args).env_remove("KLADDER_MAX_N");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Runs a command and stores its stdout under `name` in `dir`.
fn save(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let out = kladder(args, &[]);
    json_of(&out);
    let p = dir.join(name);
    std::fs::write(&p, &out.stdout).unwrap();
    p
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn assert_valid(args: &[&str]) {
    let out = kladder(args, &[]);
    let v = json_of(&out);
    assert_eq!(v["valid"], true, "{args:?}: {v}");
}

const C4: &str = "4 4\n0 1\n1 2\n2 3\n3 0\n";

#[test]
fn td2_of_the_four_cycle() {
    let dir = TempDir::new().unwrap();
    let c4 = write(dir.path(), "c4.txt", C4);
    let v = json_of(&kladder(&["param", "td_k", "--k", "2", "--graph", s(&c4)], &[]));
    assert_eq!(v["value"], 3);
    assert!(v["witness"]["bags"].is_object());
}

#[test]
fn p_a_star_counts_vertices() {
    let dir = TempDir::new().unwrap();
    let g = save(dir.path(), "g.json", &["generate", "grid", "--k", "2", "--l", "4"]);
    let v = json_of(&kladder(&["param", "pL", "--regex", "a*", "--graph", s(&g)], &[]));
    assert_eq!(v["value"], 8);
    let v = json_of(&kladder(&["param", "pL", "--regex", "a*s_inf", "--graph", s(&g)], &[]));
    assert_eq!(v["value"], 3);
}

#[test]
fn generated_grid_matches_the_library() {
    let v = json_of(&kladder(&["generate", "grid", "--k", "2", "--l", "3"], &[]));
    let g: kladder::Graph = serde_json::from_value(v).unwrap();
    assert_eq!(g, kladder::generators::grid(2, 3));
}

#[test]
fn stdin_graphs_are_read() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_kladder"))
        .args(["param", "td", "--graph", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(C4.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(json_of(&out)["value"], 3);
}

#[test]
fn certificates_round_trip() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let c4 = write(d, "c4.txt", C4);
    let star = write(d, "star.json", r#"{"n":7,"edges":[[0,1],[0,2],[0,3],[0,4],[0,5],[0,6]]}"#);
    for (name, args) in [
        ("tdk.json", vec!["param", "td_k", "--k", "2"]),
        ("pdk.json", vec!["param", "pd_k", "--k", "2"]),
        ("td.json", vec!["param", "td"]),
        ("tw.json", vec!["param", "tw"]),
    ] {
        let mut args = args;
        args.extend(["--graph", s(&c4)]);
        let p = save(d, name, &args);
        assert_valid(&["validate", "decomposition", "--graph", s(&c4), "--input", s(&p)]);
    }

    let lad = save(d, "lad.json", &["generate", "ladder", "--k", "3", "--l", "4", "--seed", "5"]);
    assert_valid(&["validate", "ladder", "--input", s(&lad)]);

    let ttp = save(d, "ttp.json", &["generate", "tree-times-path", "--k", "3", "--l", "2", "--seed", "2"]);
    let m = save(d, "m.json", &["minor", "test", "--graph", s(&ttp), "--k", "3", "--l", "2"]);
    assert_valid(&["validate", "model", "--input", s(&m)]);
    let grid = save(d, "grid.json", &["generate", "grid", "--k", "2", "--l", "2"]);
    let m = save(d, "m2.json", &["minor", "test", "--graph", s(&ttp), "--pattern", s(&grid)]);
    assert_valid(&["validate", "model", "--input", s(&m)]);

    let seq = save(d, "seq.json", &["slide", "build", "--tree", s(&star), "--k", "4"]);
    assert_valid(&["validate", "sliding", "--input", s(&seq)]);
    let compiled = save(d, "compiled.json", &["slide", "compile", "--input", s(&seq), "--l", "2"]);
    assert_valid(&["validate", "model", "--input", s(&compiled)]);
    let tree5 = write(d, "t5.json", r#"{"n":5,"edges":[[0,1],[1,2],[1,3],[3,4]]}"#);
    let gil = save(d, "gil.json", &["minor", "grid-in-ladder", "--k", "3", "--l", "2", "--tree", s(&tree5)]);
    assert_valid(&["validate", "model", "--input", s(&gil)]);

    let g6 = write(d, "g6.txt", "6 8\n0 1\n1 2\n2 0\n2 3\n3 4\n4 5\n5 3\n0 5\n");
    let ub = save(d, "ub.json", &["refine", "unbreakable", "--graph", s(&g6), "--k", "2"]);
    assert_valid(&["validate", "unbreakable", "--graph", s(&g6), "--input", s(&ub)]);
    let good = save(d, "good.json", &["refine", "good", "--graph", s(&g6), "--k", "2", "--a", "2", "--t", "3", "--s", "0,3"]);
    assert_valid(&["validate", "good", "--graph", s(&g6), "--input", s(&good)]);

    let grid3 = save(d, "grid3.json", &["generate", "grid", "--k", "2", "--l", "3"]);
    let rows = write(d, "rows.json", r#"{"rows":[[0,1,2],[3,4,5]],"connectors":[[0,3],[1,4],[2,5]]}"#);
    let ex = save(d, "ex.json", &["minor", "extract-ladder", "--graph", s(&grid3), "--input", s(&rows)]);
    assert_valid(&["validate", "model", "--input", s(&ex)]);
    assert_valid(&["validate", "ladder", "--input", s(&ex)]);

    let pair = write(d, "pair.json", r#"{"graph":{"n":3,"edges":[[0,1],[1,2]]},"U":[0,2],"B":[[0,1,2]]}"#);
    assert_valid(&["validate", "nice-pair", "--input", s(&pair)]);
}

#[test]
fn tampered_certificates_are_rejected() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let c4 = write(d, "c4.txt", C4);
    let bad = write(d, "bad.json", r#"{"witness":{"tree_edges":[[0,1]],"bags":{"0":[0,1,2],"1":[2,3]}}}"#);
    let out = kladder(&["validate", "decomposition", "--graph", s(&c4), "--input", s(&bad)], &[]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["valid"], false);
    // valid, but the largest bag is bigger than the claimed value
    let lie = write(d, "lie.json", r#"{"param":"td_k","k":2,"value":3,"witness":{"tree_edges":[],"bags":{"0":[0,1,2,3]}}}"#);
    let out = kladder(&["validate", "decomposition", "--graph", s(&c4), "--input", s(&lie)], &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let c4 = write(dir.path(), "c4.txt", C4);
    let runs: Vec<Vec<&str>> = vec![
        vec!["param", "td_k", "--k", "2", "--graph", s(&c4), "--dot"],
        vec!["generate", "ladder", "--k", "3", "--l", "5", "--seed", "11"],
        vec!["refine", "unbreakable", "--graph", s(&c4), "--k", "2", "--dot"],
        vec!["generate", "trees", "--k", "6"],
    ];
    for args in runs {
        let a = kladder(&args, &[]);
        let b = kladder(&args, &[]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn dot_fields_and_out_files() {
    let dir = TempDir::new().unwrap();
    let c4 = write(dir.path(), "c4.txt", C4);
    let v = json_of(&kladder(&["param", "td", "--graph", s(&c4), "--dot"], &[]));
    assert!(v["dot"].as_str().unwrap().starts_with("graph T {"));
    let target = dir.path().join("out.json");
    let out = kladder(&["generate", "grid", "--k", "2", "--l", "2", "--out", s(&target)], &[]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["n"], 4);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let big = save(dir.path(), "big.json", &["generate", "grid", "--k", "4", "--l", "4"]);
    let out = kladder(&["param", "td", "--graph", s(&big)], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit"));
    let c4 = write(dir.path(), "c4.txt", C4);
    let out = kladder(&["param", "td", "--graph", s(&c4)], &[("KLADDER_MAX_N", "3")]);
    assert_eq!(out.status.code(), Some(3));
    let garbage = write(dir.path(), "g.txt", "not a graph");
    assert_eq!(kladder(&["param", "td", "--graph", s(&garbage)], &[]).status.code(), Some(1));
    assert_eq!(kladder(&["param", "pL", "--regex", "(a", "--graph", s(&c4)], &[]).status.code(), Some(1));
    assert_eq!(kladder(&["param", "td_k", "--k", "0", "--graph", s(&c4)], &[]).status.code(), Some(2));
    assert_eq!(kladder(&["frobnicate"], &[]).status.code(), Some(2));
}
