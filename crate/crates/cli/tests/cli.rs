use std::path::{Path, PathBuf};
use std::process::Command;

use gmat_cli::{execute, Execution};
use gmat_core::algebra::{Algebra, LinearMapRep};
use gmat_core::json::{algebra_to_json, bilinear_to_json, linear_map_to_json, parse_gma};
use gmat_core::{build_block_partition, BilinearMapRep, PrimeField};
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Execution {
    execute(args)
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn catalog_file(dir: &TempDir, name: &str, entry: &[&str]) -> PathBuf {
    let mut args = vec!["catalog"];
    args.extend_from_slice(entry);
    let out = run(&args);
    assert_eq!(out.code, 0, "{}", out.stderr);
    write(dir, name, &out.stdout)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn catalog_entries_validate() {
    let dir = TempDir::new().unwrap();
    let f5 = PrimeField::new(5).unwrap();
    let m2 = write(&dir, "m2.json", &algebra_to_json(&Algebra::matrix(f5, 2)));
    assert_eq!(run(&["validate", "--algebra", s(&m2)]).code, 0);
    let entries: Vec<Vec<&str>> = vec![
        vec!["full", "4", "2", "5"],
        vec!["full", "3", "1", "5"],
        vec!["triangular", "3", "5"],
        vec!["triangular", "2", "5"],
        vec!["nonloyal-demo", "5"],
        vec!["peirce", s(&m2), "1,0,0,0"],
    ];
    for (i, entry) in entries.iter().enumerate() {
        let path = catalog_file(&dir, &format!("g{i}.json"), entry);
        let out = run(&["validate", s(&path)]);
        assert_eq!((out.code, out.stdout.as_str()), (0, "ok\n"), "{entry:?}");
    }
    // the Peirce split of M_2 at e11 is the 2 × 2 block partition
    let peirce = std::fs::read_to_string(dir.path().join("g5.json")).unwrap();
    assert_eq!(parse_gma(&peirce).unwrap(), build_block_partition(2, 1, 5).unwrap());
}

#[test]
fn hypotheses_exit_codes() {
    let dir = TempDir::new().unwrap();
    let full = catalog_file(&dir, "full.json", &["full", "4", "2", "5"]);
    let out = run(&["hypotheses", "--theorem", "3.4", s(&full)]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let demo = catalog_file(&dir, "demo.json", &["nonloyal-demo", "5"]);
    let out = run(&["--json", "hypotheses", "--theorem", "3.4", s(&demo)]);
    assert_eq!(out.code, 1);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    let failed: Vec<&str> = v["conditions"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fails")
        .map(|c| c["key"].as_str().unwrap())
        .collect();
    assert_eq!(
        failed,
        [
            "ZA_proper_subset",
            "ZB_proper_subset",
            "M_loyal",
            "A_noncommutative",
            "B_noncommutative",
            "center_is_domain"
        ]
    );
}

#[test]
fn decompose_lie_identity() {
    let dir = TempDir::new().unwrap();
    let g = catalog_file(&dir, "g.json", &["full", "3", "1", "5"]);
    let f5 = PrimeField::new(5).unwrap();
    let map = write(&dir, "id.json", &linear_map_to_json(&LinearMapRep::identity(f5, 9)));
    let out = run(&["--json", "decompose-lie", s(&g), s(&g), s(&map)]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["kind"], "homomorphism");
    let n = v["n"].as_array().unwrap();
    assert!(n.iter().flat_map(|c| c.as_array().unwrap()).all(|x| x == 0));
    let zero = write(&dir, "zero.json", &linear_map_to_json(&LinearMapRep::zero(f5, 9, 9)));
    assert_eq!(run(&["decompose-lie", s(&g), s(&g), s(&zero)]).code, 1);
}

#[test]
fn trace_commands() {
    let dir = TempDir::new().unwrap();
    let g = catalog_file(&dir, "g.json", &["full", "3", "1", "5"]);
    let gma = build_block_partition(3, 1, 5).unwrap();
    let product = write(&dir, "q.json", &bilinear_to_json(&BilinearMapRep::product(gma.flat())));
    let out = run(&["decompose-trace", s(&g), s(&product)]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let out = run(&["--json", "block-components", s(&g), s(&product)]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["derived"]["epsilon"], serde_json::json!([1]));
    // q(x, y) = e11 x y is not commuting
    let alg = gma.flat();
    let e = alg.basis_vector(0);
    let skew = BilinearMapRep::from_fn(gma.field(), 9, |i, j| {
        alg.mul(&e, &alg.mul(&alg.basis_vector(i), &alg.basis_vector(j)))
    });
    let skew = write(&dir, "skew.json", &bilinear_to_json(&skew));
    assert_eq!(run(&["block-components", s(&g), s(&skew)]).code, 1);
    let out = run(&["--json", "trace-space", "--kind", "commuting", s(&g)]);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["dimension"], 55);
    assert_eq!(v["all_proper"], true);
}

#[test]
fn check_identity_exit_codes() {
    let dir = TempDir::new().unwrap();
    let t2 = catalog_file(&dir, "t2.json", &["triangular", "2", "5"]);
    assert_eq!(run(&["check-identity", s(&t2)]).code, 0);
    let full = catalog_file(&dir, "full.json", &["full", "4", "2", "5"]);
    assert_eq!(run(&["check-identity", s(&full)]).code, 1);
    let t3 = catalog_file(&dir, "t3.json", &["triangular", "3", "3"]);
    let out = run(&["--enum-cap", "10", "check-identity", s(&t3)]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("exceeds the cap"));
}

#[test]
fn json_reports_round_trip() {
    let dir = TempDir::new().unwrap();
    let g = catalog_file(&dir, "g.json", &["full", "3", "1", "5"]);
    let demo = catalog_file(&dir, "demo.json", &["nonloyal-demo", "3"]);
    let commands: Vec<Vec<&str>> = vec![
        vec!["--json", "validate", s(&g)],
        vec!["--json", "center", s(&g)],
        vec!["--json", "hypotheses", "--theorem", "3.17", s(&g)],
        vec!["--json", "hypotheses", "--theorem", "3.4", s(&demo)],
        vec!["--json", "trace-space", "--kind", "centralizing", s(&demo)],
        vec!["--json", "check-identity", s(&g)],
    ];
    for args in commands {
        let first = run(&args);
        let v: Value = serde_json::from_str(&first.stdout).unwrap();
        let echoed: Vec<String> = v["command"]
            .as_array()
            .unwrap()
            .iter()
            .map(|a| a.as_str().unwrap().to_string())
            .collect();
        let second = execute(&echoed);
        assert_eq!(first, second, "{args:?}");
    }
}

#[test]
fn input_errors_name_the_json_path() {
    let dir = TempDir::new().unwrap();
    let out = run(&["catalog", "full", "2", "1", "5"]);
    let mut v: Value = serde_json::from_str(&out.stdout).unwrap();
    v["A"]["mult"][0][0][0] = 7.into();
    let bad = write(&dir, "bad.json", &v.to_string());
    let out = run(&["validate", s(&bad)]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("A.mult[0][0][0]"), "{}", out.stderr);
    v["A"]["mult"][0][0][0] = "x".into();
    let bad = write(&dir, "bad2.json", &v.to_string());
    let out = run(&["center", s(&bad)]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("A.mult[0][0][0]"), "{}", out.stderr);
    assert_eq!(run(&["center", "/nonexistent/g.json"]).code, 2);
    assert_eq!(run(&["catalog", "full", "3", "3", "5"]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
}

#[test]
fn invalid_context_is_reported_by_validate() {
    let dir = TempDir::new().unwrap();
    let out = run(&["catalog", "full", "3", "1", "5"]);
    let mut v: Value = serde_json::from_str(&out.stdout).unwrap();
    for n in v["psiNM"].as_array_mut().unwrap() {
        for m in n.as_array_mut().unwrap() {
            for k in m.as_array_mut().unwrap() {
                *k = 0.into();
            }
        }
    }
    let bad = write(&dir, "bad.json", &v.to_string());
    let out = run(&["validate", s(&bad)]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("violation"));
    assert_eq!(run(&["center", s(&bad)]).code, 2);
}

#[test]
fn binary_exit_codes() {
    let dir = TempDir::new().unwrap();
    let demo = catalog_file(&dir, "demo.json", &["nonloyal-demo", "5"]);
    let bin = env!("CARGO_BIN_EXE_gmat");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["validate", s(&demo)]), Some(0));
    assert_eq!(status(&["hypotheses", "--theorem", "3.4", s(&demo)]), Some(1));
    assert_eq!(status(&["hypotheses", "--theorem", "7.7", s(&demo)]), Some(2));
}

#[test]
fn timing_only_when_requested() {
    let dir = TempDir::new().unwrap();
    let g = catalog_file(&dir, "g.json", &["full", "2", "1", "3"]);
    assert!(!run(&["--json", "center", s(&g)]).stdout.contains("elapsed"));
    assert!(run(&["--json", "--timing", "center", s(&g)])
        .stdout
        .contains("elapsed_ms"));
}
