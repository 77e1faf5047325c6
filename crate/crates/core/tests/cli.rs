use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mtw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtw"))
        .args(args)
        .env_remove("MTW_DEFAULT_TOLERANCE")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

struct Fixture {
    _dir: TempDir,
    tree: PathBuf,
    points: PathBuf,
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn star3() -> Fixture {
    let dir = TempDir::new().unwrap();
    let tree = write(dir.path(), "star3.tsv", "# STAR3\nc\tu\t1\nc\tv\t2\nc\tw\t3\n");
    let points = write(dir.path(), "A.txt", "V u\nV v\nV w\n");
    Fixture {
        _dir: dir,
        tree,
        points,
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn width_n2_on_star3() {
    let f = star3();
    let out = mtw(&["width", "--tree", s(&f.tree), "--points", s(&f.points), "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["hi"], "1");
    assert_eq!(v["lo"], "1");
    assert_eq!(v["op"], "tn_width");
    assert_eq!(v["schema"], "1");
    assert_eq!(v["tolerance"], "1e-9");
    assert_eq!(v["star_convention"], false);
    assert_eq!(v["witness"]["final_points"], serde_json::json!(["V v", "V w"]));
}

#[test]
fn output_is_byte_stable_with_sorted_keys() {
    let f = star3();
    let args = ["width", "--tree", s(&f.tree), "--points", s(&f.points), "--n", "1"];
    let a = mtw(&args);
    let b = mtw(&args);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let keys: Vec<&str> = ["\"exact\"", "\"hi\"", "\"lo\"", "\"n\"", "\"op\"", "\"schema\""]
        .into_iter()
        .collect();
    let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");
}

#[test]
fn tolerance_from_environment_and_flag() {
    let f = star3();
    let out = Command::new(env!("CARGO_BIN_EXE_mtw"))
        .args(["width", "--tree", s(&f.tree), "--points", s(&f.points), "--n", "1"])
        .env("MTW_DEFAULT_TOLERANCE", "0.001")
        .output()
        .unwrap();
    assert_eq!(json(&out)["tolerance"], "0.001");
    let out = mtw(&["width", "--tree", s(&f.tree), "--points", s(&f.points), "--n", "1", "--tolerance", "1/64"]);
    let v = json(&out);
    assert_eq!(v["tolerance"], "1/64");
    assert_eq!(v["hi"], "5/2");
}

#[test]
fn radial_ball_width_prints_the_radius() {
    let out = mtw(&["radial", "ball-width", "--r", "1", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"], "1");
    let out = mtw(&["radial", "ball-width", "--r", "5/2", "--n", "100", "--output", "plain"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "5/2");
    let out = mtw(&["radial", "unbounded", "--n", "3"]);
    assert_eq!(json(&out)["value"], "infinity");
}

#[test]
fn check_suite_exit_codes() {
    let out = mtw(&["check", "--suite", "noninc", "--seed", "42", "--trials", "200"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["passed"], true);
    let out = mtw(&["check", "--suite", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn usage_and_domain_errors() {
    let f = star3();
    let out = mtw(&["width", "--tree", s(&f.tree), "--points", s(&f.points), "--n", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    let out = mtw(&["width", "--tree", s(&f.tree), "--points", s(&f.points), "--n", "1", "--tolerance", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = mtw(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));

    let bad = write(f._dir.path(), "bad.tsv", "a\tb\t1\nb\ta\t2\n");
    let out = mtw(&["validate", "--tree", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let nwk = write(f._dir.path(), "bad.nwk", "(u,v);\n");
    let out = mtw(&["validate", "--tree", s(&nwk)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing branch length"));
    let empty = write(f._dir.path(), "empty.txt", "# none\n");
    let out = mtw(&["width", "--tree", s(&f.tree), "--points", s(&empty), "--n", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn geometry_commands() {
    let f = star3();
    let base = ["--tree", s(&f.tree), "--points", s(&f.points)];
    let run = |cmd: &str| json(&mtw(&[&[cmd][..], &base[..]].concat()));
    assert_eq!(run("dimension")["dimension"], 3);
    assert_eq!(run("final-points")["final_points"], serde_json::json!(["V u", "V v", "V w"]));
    assert_eq!(run("hull")["length"], "6");
    let cw = run("compact-width");
    assert_eq!(cw["value"], "0");
    assert_eq!(cw["attained"], true);
    let seq = json(&mtw(&[&["width-seq", "--n-max", "4"][..], &base[..]].concat()));
    let his: Vec<&str> = seq["sequence"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["hi"].as_str().unwrap())
        .collect();
    assert_eq!(his, ["5/2", "1", "0", "0"]);
    assert_eq!(seq["sequence"][3]["star_convention"], true);
    let v = json(&mtw(&["validate", "--tree", s(&f.tree), "--approx"]));
    assert_eq!(v["max_dimension"], 3);
    assert_eq!(v["approx"]["total_length"], 6.0);
}

#[test]
fn p1_witness_command() {
    let f = star3();
    let out = mtw(&[
        "p1-witness", "--tree", s(&f.tree), "--x", "V u", "--y", "V w", "--epsilon", "4", "--r", "1", "--theta", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["delta"], "2");
    assert_eq!(v["z"], "E c w 1");
    assert_eq!(v["check"]["passed"], true);
    let out = mtw(&[
        "p1-witness", "--tree", s(&f.tree), "--x", "V u", "--y", "V w", "--epsilon", "4", "--r", "1", "--theta", "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gen_round_trips_through_newick_and_tsv() {
    let dir = TempDir::new().unwrap();
    let pts = dir.path().join("pts.txt");
    let out = mtw(&["gen", "--seed", "7", "--min-vertices", "10", "--max-vertices", "10", "--points", "4", "--points-out", s(&pts)]);
    assert_eq!(out.status.code(), Some(0));
    let tsv = write(dir.path(), "g.tsv", &String::from_utf8(out.stdout).unwrap());
    let out = mtw(&["gen", "--seed", "7", "--min-vertices", "10", "--max-vertices", "10", "--format", "newick"]);
    let nwk = write(dir.path(), "g.nwk", &String::from_utf8(out.stdout).unwrap());
    let a = json(&mtw(&["validate", "--tree", s(&tsv)]));
    let b = json(&mtw(&["validate", "--tree", s(&nwk)]));
    assert_eq!(a, b);
    assert_eq!(a["vertices"], 10);
    let w = mtw(&["width", "--tree", s(&nwk), "--points", s(&pts), "--n", "2", "--brute-force", "1/16"]);
    assert_eq!(w.status.code(), Some(0));
}
