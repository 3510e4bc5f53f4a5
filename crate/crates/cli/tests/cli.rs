use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn koszul(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_koszul"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn double_point_degrees() {
    let o = koszul(&["wq", path(&data("problems/double_point.json")), "--q", "1..3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\t4\n2\t6\n3\t8\n");
}

#[test]
fn double_point_over_rationals_with_verification() {
    let o = koszul(&["--field", "QQ", "--verify", "wq", path(&data("problems/double_point.json")), "--q", "1..5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\t4\n2\t6\n3\t8\n4\t10\n5\t12\n");
}

#[test]
fn full_k_gives_zeros() {
    let o = koszul(&["wq", path(&data("problems/full.json")), "--q", "0..4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().all(|l| l.ends_with("\t0")));
    assert_eq!(stdout(&o).lines().count(), 5);
}

#[test]
fn json_output_is_one_document() {
    let o = koszul(&["--format", "json", "wq", path(&data("problems/double_point.json")), "--q", "2"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["values"][0]["dim"], 6);
    assert_eq!(v["n"], 4);
}

#[test]
fn hilbert_summary() {
    let o = koszul(&["hilbert", path(&data("problems/double_point.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("0\t2\n1\t4\n"));
    assert!(out.contains("# resonance_trivial\tfalse"));
    assert!(out.contains("# base_locus_length\t2"));
}

#[test]
fn missing_file_exits_2() {
    assert_eq!(koszul(&["wq", "/nonexistent/problem.json"]).status.code(), Some(2));
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"n\": 4, ").unwrap();
    assert_eq!(koszul(&["wq", bad.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&bad, r#"{"n": 4, "K_basis": [[1,0,0,0,0,0]], "K_perp_basis": [[1,0,0,0,0,0]]}"#).unwrap();
    assert_eq!(koszul(&["wq", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(koszul(&["wq", bad.to_str().unwrap(), "--q", "3..1"]).status.code(), Some(2));
}

#[test]
fn ambient_mismatch_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let short = dir.path().join("short.json");
    fs::write(&short, r#"{"n": 4, "K_basis": [[1, 0, 0]]}"#).unwrap();
    assert_eq!(koszul(&["wq", short.to_str().unwrap()]).status.code(), Some(3));
    let o = koszul(&["--field", "GFp:7", "wq", path(&data("problems/non_separable.json")), "--q", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn complete_graph_on_four_vertices() {
    let o = koszul(&["graphic", path(&data("graphs/k4.edges"))]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let comps: Vec<&str> = out.lines().filter(|l| l.starts_with("component\t")).collect();
    assert_eq!(comps.len(), 5);
    assert!(comps.iter().all(|l| l.ends_with("\ttrue\ttrue\ttrue")));
    assert!(out.contains("chen\t5\t20\t20\tAGREE"));
    assert!(out.ends_with("verdict\tAGREE\n"));
}

#[test]
fn edge_list_through_the_arrangement_command() {
    let o = koszul(&["arrangement", path(&data("graphs/k4.edges")), "--q", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("chen\t5\t20\t20\tAGREE"));
}

#[test]
fn triangle_free_graph() {
    let o = koszul(&["graphic", path(&data("graphs/c4.edges"))]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(!out.contains("component\t"));
    for l in out.lines().filter(|l| l.starts_with("chen\t")) {
        assert!(l.ends_with("\t0\t0\tAGREE"), "{l}");
    }
}

#[test]
fn braid_arrangement_needs_its_multinet() {
    let arr = data("arrangements/braid_a3.json");
    let with = koszul(&["arrangement", path(&arr), "--multinet", path(&data("multinets/braid_a3.json"))]);
    assert_eq!(with.status.code(), Some(0));
    assert!(stdout(&with).contains("multinet\t0\tvalid\tspans_equal"));
    let without = koszul(&["arrangement", path(&arr)]);
    assert_eq!(without.status.code(), Some(4));
    assert!(stdout(&without).contains("verdict\tDISAGREE"));
}

#[test]
fn non_separable_component_report() {
    let o = koszul(&[
        "resonance",
        path(&data("problems/non_separable.json")),
        "--component",
        path(&data("components/non_separable.json")),
        "--vector",
        "1,0,0,0,0,0",
        "--vector",
        "0,0,0,1,0,0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("component\tspan(e1,e2,e3)\t3\ttrue\tfalse\tfalse"));
    assert!(out.contains("vector\t1,0,0,0,0,0\ttrue"));
    assert!(out.contains("vector\t0,0,0,1,0,0\tfalse"));
}

#[test]
fn generic_vanishing_records() {
    let o = koszul(&["generic-vanishing", "--n", "6", "--seeds", "1,2,3"]);
    assert_eq!(o.status.code(), Some(0));
    let records: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 3);
    for (r, seed) in records.iter().zip(1..) {
        assert_eq!(r["n"], 6);
        assert_eq!(r["seed"], seed);
        assert_eq!(r["dim"], 0);
        assert_eq!(r["m"], 10);
        assert_eq!(r["q"], 2);
    }
}

#[test]
fn generic_vanishing_without_seed_is_rejected() {
    assert_eq!(koszul(&["generic-vanishing", "--n", "6"]).status.code(), Some(2));
    assert_eq!(koszul(&["generic-vanishing", "--n", "4", "--seed", "1"]).status.code(), Some(2));
}

#[test]
fn witness_check_passes() {
    let o = koszul(&["generic-vanishing", "--n", "5", "--witness"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS"));
}

#[test]
fn sweeps_resume_from_their_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("runs.jsonl");
    let kept = r#"{"n":6,"m":10,"q":2,"prime":32003,"seed":2,"dim":0,"ms":12345,"prng":"rand_chacha::ChaCha8Rng/seed_from_u64"}"#;
    fs::write(&out, format!("{kept}\n")).unwrap();
    let o = koszul(&["generic-vanishing", "--n", "6", "--seeds", "3,1,2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1], kept);
    let seeds: Vec<u64> = lines
        .iter()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["seed"].as_u64().unwrap())
        .collect();
    assert_eq!(seeds, [1, 2, 3]);
}

#[test]
fn sweeps_are_deterministic() {
    let strip = |o: Output| -> Vec<Value> {
        stdout(&o)
            .lines()
            .map(|l| {
                let mut v: Value = serde_json::from_str(l).unwrap();
                v["ms"] = Value::Null;
                v
            })
            .collect()
    };
    let a = strip(koszul(&["generic-vanishing", "--n", "5,6", "--seeds", "1,2", "--jobs", "1"]));
    let b = strip(koszul(&["generic-vanishing", "--n", "5,6", "--seeds", "1,2", "--jobs", "2"]));
    assert_eq!(a, b);
}

#[test]
fn random_problems_need_a_seed() {
    assert_eq!(koszul(&["wq", "--random", "5:8", "--q", "1"]).status.code(), Some(2));
    let a = koszul(&["wq", "--random", "5:8", "--q", "1", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), "1\t1\n");
}

#[test]
fn matrix_rank() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.tsv");
    fs::write(&m, "# 3 3 QQ\n0\t0\t1\n0\t1\t2\n1\t0\t2\n1\t1\t4\n2\t2\t1/3\n").unwrap();
    let o = koszul(&["rank", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("rank\t2\n"));
}
