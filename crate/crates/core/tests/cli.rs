//! The `flowcat` binary end to end: outputs, written files and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use flowcat::comparison::ComparisonData;
use flowcat::flowcat::{standard, FlowCategory, FlowObject, ModuliZero};
use flowcat::io::CategoryFile;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn flowcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flowcat")).args(args).output().expect("binary runs")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let o = flowcat(args);
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap(), String::from_utf8(o.stderr).unwrap())
}

fn write(dir: &TempDir, name: &str, file: &CategoryFile) -> String {
    let p = dir.path().join(name);
    file.write(&p).unwrap();
    p.to_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn free_ranks(v: &serde_json::Value) -> Vec<(i64, u64)> {
    v["homology"].as_array().unwrap().iter().map(|r| (r["degree"].as_i64().unwrap(), r["free_rank"].as_u64().unwrap())).collect()
}

#[test]
fn validate_fixture() {
    let (code, out, _) = run(&["validate", s(&fixture("torus.json"))]);
    assert_eq!(code, 0);
    assert!(out.contains("PASS"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn nonzero_composite_fails_validation_and_names_the_pair() {
    let dir = TempDir::new().unwrap();
    let f = FlowCategory::new(
        vec![FlowObject::new("top", 2), FlowObject::new("mid", 1), FlowObject::new("bot", 0)],
        vec![ModuliZero::new("top", "mid", vec![1]), ModuliZero::new("mid", "bot", vec![1])],
    );
    let p = write(&dir, "bad.json", &CategoryFile::new(f));
    let (code, out, _) = run(&["validate", &p]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"));
    assert!(out.contains("(top,bot)"), "{out}");
}

#[test]
fn malformed_files_give_exit_2() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("broken.json");
    std::fs::write(&p, "{ \"format\": ").unwrap();
    for cmd in ["validate", "homology", "spectral", "compare", "realize"] {
        assert_eq!(run(&[cmd, s(&p)]).0, 2, "{cmd}");
    }
    assert_eq!(run(&["validate", s(&dir.path().join("missing.json"))]).0, 2);
}

#[test]
fn bad_flags_give_exit_2() {
    assert_eq!(run(&["homology", s(&fixture("torus.json")), "--coeffs", "Fp:4"]).0, 2);
    assert_eq!(run(&["homology", s(&fixture("torus.json")), "--coeffs", "R"]).0, 2);
}

#[test]
fn homology_of_fixtures() {
    let torus = json(&["homology", s(&fixture("torus.json")), "--json"]);
    assert_eq!(free_ranks(&torus), [(0, 1), (1, 2), (2, 1)]);
    let sphere = json(&["homology", s(&fixture("sphere.json")), "--json"]);
    assert_eq!(free_ranks(&sphere), [(0, 1), (1, 0), (2, 1)]);
    let (code, out, _) = run(&["homology", s(&fixture("torus.json")), "--coeffs", "Fp:3"]);
    assert_eq!(code, 0);
    assert!(out.contains('2'));
}

#[test]
fn homology_of_empty_category_is_an_empty_table() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "empty.json", &CategoryFile::new(FlowCategory::default()));
    let v = json(&["homology", &p, "--json"]);
    assert!(v["homology"].as_array().unwrap().is_empty());
}

#[test]
fn homology_writes_tables() {
    let dir = TempDir::new().unwrap();
    let (code, _, err) = run(&["homology", s(&fixture("torus.json")), "--out", s(dir.path())]);
    assert_eq!(code, 0, "{err}");
    assert!(dir.path().join("homology.tsv").exists());
    assert!(dir.path().join("homology.json").exists());
}

#[test]
fn spectral_with_a_two_term_theory_doubles_the_rows() {
    let (code, out, _) = run(&["spectral", s(&fixture("torus.json")), "--coeffs", "Q", "--theory", "0:1,1:1"]);
    assert_eq!(code, 0);
    let e1: Vec<&str> = out.lines().skip_while(|l| !l.starts_with("E_1")).skip(2).take(2).collect();
    assert_eq!(e1.len(), 2);
    for row in e1 {
        assert_eq!(row.split_whitespace().skip(1).collect::<Vec<_>>(), ["1", "2", "1"], "{out}");
    }
    // the collapse check runs for ordinary coefficients only
    assert!(!out.contains("PASS"));
    let (code, out, _) = run(&["spectral", s(&fixture("torus.json")), "--coeffs", "Fp:2"]);
    assert_eq!(code, 0);
    assert!(out.contains("PASS") && !out.contains("FAIL"), "{out}");
}

#[test]
fn generated_torus_is_reproducible() {
    let want = std::fs::read_to_string(fixture("torus.json")).unwrap();
    for jobs in ["1", "4"] {
        let dir = TempDir::new().unwrap();
        let (code, _, err) = run(&["generate", "torus", "--jobs", jobs, "--out", s(dir.path())]);
        assert_eq!(code, 0, "{err}");
        let got = std::fs::read_to_string(dir.path().join("torus.json")).unwrap();
        assert_eq!(got, want, "--jobs {jobs}");
        let file = CategoryFile::parse(&got).unwrap();
        assert_eq!(file.category.objects.len(), 4);
        assert!(dir.path().join("torus_trajectories").read_dir().unwrap().next().is_some());
    }
}

#[test]
fn generation_failures() {
    assert_eq!(run(&["generate", "klein-bottle"]).0, 2);
    assert_eq!(run(&["generate", "loopspace:2,zero,0.1"]).0, 2);
    assert_eq!(run(&["generate", "monkey-saddle"]).0, 3);
}

#[test]
fn compare_identity_and_fixtures() {
    let dir = TempDir::new().unwrap();
    let id = CategoryFile::new(FlowCategory::default()).with_comparison(&ComparisonData::identity(&standard::torus()));
    let p = write(&dir, "identity.json", &id);
    assert_eq!(run(&["compare", &p]).0, 0);
    for name in ["torus-vs-tilted.json", "dumbbell-vs-rotated.json"] {
        let (code, out, err) = run(&["compare", s(&fixture(name))]);
        assert_eq!(code, 0, "{name}: {out}{err}");
        assert!(!out.contains("FAIL"));
    }
}

#[test]
fn corrupted_comparisons_fail() {
    let dir = TempDir::new().unwrap();
    // doubling one diagonal entry keeps a chain map but not an isomorphism
    let mut f = CategoryFile::read(&fixture("torus-vs-tilted.json")).unwrap();
    let b = f.comparison.as_mut().unwrap();
    let m = b.mixed0.iter_mut().find(|m| m.from.starts_with("p1")).unwrap();
    m.signs.push(m.signs[0]);
    let p = write(&dir, "doubled.json", &f);
    let (code, out, _) = run(&["compare", &p]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"));

    // removing a degree-0 entry where the differential is nonzero breaks Ψ∂ = ∂Ψ
    let mut f = CategoryFile::read(&fixture("dumbbell-vs-rotated.json")).unwrap();
    let b = f.comparison.as_mut().unwrap();
    let i = b.mixed0.iter().position(|m| f.category.index(&m.from) == Some(0)).unwrap();
    b.mixed0.remove(i);
    let p = write(&dir, "dropped.json", &f);
    let (code, out, _) = run(&["compare", &p]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("FAIL"));
}

#[test]
fn compare_without_a_block_gives_exit_2() {
    assert_eq!(run(&["compare", s(&fixture("torus.json"))]).0, 2);
}

#[test]
fn realize_torus() {
    let v = json(&["realize", s(&fixture("torus.json")), "--shift", "2", "--json"]);
    let mut dims: Vec<u64> = v["cells"].as_array().unwrap().iter().map(|c| c["dimension"].as_u64().unwrap()).collect();
    dims.sort_unstable();
    assert_eq!(dims, [2, 3, 3, 4]);
    assert_eq!(run(&["realize", s(&fixture("torus.json")), "--shift", "1"]).0, 4);
    let dir = TempDir::new().unwrap();
    let (code, _, err) = run(&["realize", s(&fixture("torus.json")), "--out", s(dir.path())]);
    assert_eq!(code, 0, "{err}");
    for f in ["cw.dot", "cw.tsv", "cw.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn realize_single_object() {
    let dir = TempDir::new().unwrap();
    let f = FlowCategory::new(vec![FlowObject::new("x", 3)], vec![]);
    let p = write(&dir, "point.json", &CategoryFile::new(f));
    let v = json(&["realize", &p, "--json"]);
    assert_eq!(v["cells"].as_array().unwrap().len(), 1);
}
