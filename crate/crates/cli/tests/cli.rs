use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn incompat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_incompat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const H: f64 = 0.5;

/// Effects of the sigma_z, sigma_x and sigma_y bases, rows of `[re, im]`.
fn pauli_file(count: usize) -> String {
    let z = r#"{"effects": [[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[1,0]]]]}"#.to_string();
    let x = format!(
        r#"{{"effects": [[[[{H},0],[{H},0]],[[{H},0],[{H},0]]], [[[{H},0],[-{H},0]],[[-{H},0],[{H},0]]]]}}"#
    );
    let y = format!(
        r#"{{"effects": [[[[{H},0],[0,-{H}]],[[0,{H}],[{H},0]]], [[[{H},0],[0,{H}]],[[0,-{H}],[{H},0]]]]}}"#
    );
    let all = [z, x, y];
    format!(r#"{{"dim": 2, "measurements": [{}]}}"#, all[..count].join(","))
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn bounds_for_three_bits() {
    let v = json(&incompat(&["bounds", "--n", "3", "--outcomes", "2", "--dim", "2"]));
    assert_eq!(v["s_classical"]["num"], 3);
    assert_eq!(v["s_classical"]["den"], 4);
    assert_eq!(v["method"], "EXACT_FORMULA");
    assert!((v["s_upper"].as_f64().unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn bounds_fall_back_to_search_for_large_messages() {
    let v = json(&incompat(&["bounds", "--outcomes", "2,3", "--dim", "4"]));
    assert_eq!(v["method"], "BRUTE_FORCE");
    assert_eq!(v["s_classical"]["num"], 5);
    assert_eq!(v["s_classical"]["den"], 6);
}

#[test]
fn mismatched_outcome_count_is_rejected() {
    let out = incompat(&["bounds", "--n", "3", "--outcomes", "2,2", "--dim", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn guard_exceedance_exits_with_three() {
    let out = incompat(&["bounds", "--n", "6", "--outcomes", "4", "--dim", "5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit"));
    let out = incompat(&["bounds", "--n", "12", "--outcomes", "4", "--dim", "2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn pauli_triple_is_witnessed() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "mub.json", &pauli_file(3));
    let v = json(&incompat(&["witness", "--measurements", &path]));
    assert_eq!(v["verdict"], "INCOMPATIBLE");
    let q = v["s_quantum"].as_f64().unwrap();
    assert!((q - (3.0 + 3f64.sqrt()) / 6.0).abs() < 1e-9);

    let v = json(&incompat(&["qvalue", "--measurements", &path, "--n", "3", "--dim", "2"]));
    assert!((v["s_quantum"].as_f64().unwrap() - q).abs() < 1e-15);
}

#[test]
fn declared_shape_must_match_the_file() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "mub.json", &pauli_file(2));
    assert_eq!(incompat(&["qvalue", "--measurements", &path, "--dim", "3"]).status.code(), Some(2));
    assert_eq!(incompat(&["witness", "--measurements", &path, "--n", "3"]).status.code(), Some(2));
}

#[test]
fn malformed_files_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let broken = write(&dir, "broken.json", "{\"dim\": 2, \"measurements\": [");
    assert_eq!(incompat(&["witness", "--measurements", &broken]).status.code(), Some(2));
    let not_povm = pauli_file(1).replace("[[1,0],[0,0]],[[0,0],[0,0]]", "[[2,0],[0,0]],[[0,0],[0,0]]");
    let path = write(&dir, "bad.json", &not_povm);
    assert_eq!(incompat(&["witness", "--measurements", &path]).status.code(), Some(2));
    let missing = dir.path().join("absent.json");
    let out = incompat(&["qvalue", "--measurements", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compat_upgrades_unbiased_pair() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "pair.json", &pauli_file(2));
    let v = json(&incompat(&["compat", "--measurements", &path, "--max-iterations", "500"]));
    assert_eq!(v["status"], "INCOMPATIBLE");
    assert_eq!(v["witness"]["verdict"], "INCOMPATIBLE");
}

/// Pauli bases with effects `(I +- eta sigma) / 2`.
fn noisy_pauli_file(eta: f64) -> String {
    let (p, m, h) = ((1.0 + eta) / 2.0, (1.0 - eta) / 2.0, eta / 2.0);
    let effects = [
        ([[p, 0.0], [0.0, 0.0], [0.0, 0.0], [m, 0.0]], [[m, 0.0], [0.0, 0.0], [0.0, 0.0], [p, 0.0]]),
        ([[0.5, 0.0], [h, 0.0], [h, 0.0], [0.5, 0.0]], [[0.5, 0.0], [-h, 0.0], [-h, 0.0], [0.5, 0.0]]),
        ([[0.5, 0.0], [0.0, -h], [0.0, h], [0.5, 0.0]], [[0.5, 0.0], [0.0, h], [0.0, -h], [0.5, 0.0]]),
    ];
    let matrix = |e: [[f64; 2]; 4]| format!("[[{:?},{:?}],[{:?},{:?}]]", e[0], e[1], e[2], e[3]);
    let ms: Vec<String> = effects
        .iter()
        .map(|&(a, b)| format!(r#"{{"effects": [{}, {}]}}"#, matrix(a), matrix(b)))
        .collect();
    format!(r#"{{"dim": 2, "measurements": [{}]}}"#, ms.join(","))
}

#[test]
fn strict_compat_reports_undecided_sets() {
    // incompatible above visibility 1/sqrt(3), witnessed only above sqrt(3)/2
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "noisy.json", &noisy_pauli_file(0.7));
    let args = ["compat", "--measurements", &path, "--max-iterations", "300"];
    let v = json(&incompat(&args));
    assert_eq!(v["status"], "INDETERMINATE");
    assert_eq!(v["witness"]["verdict"], "NO_WITNESS");
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(incompat(&strict).status.code(), Some(3));

    let path = write(&dir, "compatible.json", &noisy_pauli_file(0.5));
    let v = json(&incompat(&["compat", "--measurements", &path, "--strict"]));
    assert_eq!(v["status"], "COMPATIBLE");
}

#[test]
fn seesaw_requires_a_seed() {
    let out = incompat(&["seesaw", "--outcomes", "2,2", "--dim", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(incompat(&["demo"]).status.code(), Some(2));
}

#[test]
fn seesaw_is_reproducible_and_labeled() {
    let args = ["seesaw", "--n", "2", "--outcomes", "2", "--dim", "2", "--restarts", "2", "--seed", "5"];
    let a = json(&incompat(&args));
    let b = json(&incompat(&args));
    assert_eq!(a, b);
    assert_eq!(a["label"], "HEURISTIC");
    assert_eq!(a["restarts"].as_array().unwrap().len(), 2);
    let v = a["value"].as_f64().unwrap();
    assert!(v <= (2.0 + 2f64.sqrt()) / 4.0 + 1e-9 && v > 0.75);
}

#[test]
fn triple_scan_csv_has_one_row_per_point() {
    let out = incompat(&["scan-triples", "--csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 41 * 41 * 41 * 2 + 1);
    let columns = lines[0].split(',').count();
    assert!(lines[1..].iter().all(|l| l.split(',').count() == columns));
}

#[test]
fn table_output_is_key_value() {
    let out = incompat(&["bounds", "--outcomes", "2,2", "--dim", "2", "--table"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("method") && l.ends_with("EXACT_FORMULA")));
}
