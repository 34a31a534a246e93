use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bettilab")).args(args).output().unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn write_ideal(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn betti_of_triangle() {
    let out = run(&["betti", &data("triangle.ideal"), "--field", "q", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let top = v["entries"].as_array().unwrap().iter().find(|e| e["deg"] == serde_json::json!([1, 1, 1])).unwrap();
    assert_eq!(top["i"], 2);
    assert_eq!(top["beta"], 2);
}

#[test]
fn sdepth_of_first_example() {
    let out = run(&["sdepth", &data("i1.ideal"), "--side", "quotient", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["value"], 1);
    assert_eq!(v["spdim"], 4);
    assert_eq!(v["nvars"], 5);
    assert!(!v["certificate"]["intervals"].as_array().unwrap().is_empty());
}

#[test]
fn onestep_on_triangle_is_not_applicable() {
    let out = run(&["check-onestep", &data("triangle.ideal"), "--var", "z", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json_lines(&out);
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["verdict"], "not-applicable");
    assert_eq!(reports[0]["schema"], 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_ideal(dir.path(), "bad.ideal", "vars x\ngen q\n");
    assert_eq!(run(&["betti", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["summary"]).status.code(), Some(1));
    assert_eq!(run(&["sdepth", &data("i1.ideal"), "--budget", "2"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn squarefree_gate_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_ideal(dir.path(), "sq.ideal", "vars x y\ngen x^2\ngen y\n");
    let out = run(&["check-onestep", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("squarefree"));
}

#[test]
fn gen_corpus_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let args = [
            "gen-corpus", "--out", out.to_str().unwrap(), "--vars", "4", "--gens", "4", "--squarefree",
            "--count", "50", "--seed", seed,
        ];
        assert_eq!(run(&args).status.code(), Some(0));
        let manifest: Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
        manifest
    };
    let a = gen("a", "7");
    let b = gen("b", "7");
    let c = gen("c", "8");
    assert_eq!(a, b);
    assert_eq!(a["files"].as_array().unwrap().len(), 50);
    assert_ne!(a["files"], c["files"]);
    let files = std::fs::read_dir(dir.path().join("a")).unwrap().filter(|e| {
        e.as_ref().unwrap().path().extension().is_some_and(|x| x == "ideal")
    });
    assert_eq!(files.count(), 50);

    let small = dir.path().join("small");
    let args = ["gen-corpus", "--out", small.to_str().unwrap(), "--vars", "3", "--gens", "3", "--count", "10", "--seed", "1"];
    assert_eq!(run(&args).status.code(), Some(0));
    let m: Value = serde_json::from_slice(&std::fs::read(small.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["files"].as_array().unwrap().len(), 10);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("summary.json");
    let out = run(&["summary", &data("i2.ideal"), "--json", "--output", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(target).unwrap()).unwrap();
    assert_eq!(v["pdim_quotient"], 3);
}

#[test]
fn empty_corpus_directory_gives_empty_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["check-bounds", dir.path().to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn reduction_by_element() {
    let out = run(&["check-reduction", &data("triangle.ideal"), "--element", "x*y", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_lines(&out);
    assert_eq!(r[0]["verdict"], "holds");
    assert_eq!(r[0]["quantities"]["rank"], 1);
}

#[test]
fn text_commands_run() {
    for cmd in ["lcm", "betti", "betti-poset", "scarf", "hilbert", "summary", "mb-chain"] {
        let out = run(&[cmd, &data("triangle.ideal")]);
        assert_eq!(out.status.code(), Some(0), "{cmd}");
        assert!(!out.stdout.is_empty(), "{cmd}");
    }
    let out = run(&["check-generic", &data("triangle.ideal"), &data("triangle.ideal")]);
    assert_eq!(out.status.code(), Some(1));
}
