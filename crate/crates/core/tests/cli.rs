use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use num_complex::Complex64;
use serde_json::Value;

use crnr::io::{load_class_file, load_signal};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Runs the binary; returns the exit code and the parsed summary line.
fn crnr(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_crnr")).args(args).output().expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let summary = stdout.lines().last().map(|l| serde_json::from_str(l).unwrap()).unwrap_or(Value::Null);
    (out.status.code().unwrap(), summary)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Rows of a CSV file keyed by header name.
fn csv(p: &Path) -> Vec<std::collections::HashMap<String, String>> {
    let text = fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    lines
        .map(|l| header.iter().cloned().zip(l.split(',').map(String::from)).collect())
        .collect()
}

#[test]
fn class_fixtures_hold_the_published_values() {
    let z1 = load_class_file(fixture("z1.json")).unwrap();
    assert_eq!(z1.len(), 10);
    assert_eq!(z1.freqs()[0], Complex64::new(0.4474, 0.5822));
    let z2 = load_class_file(fixture("z2.json")).unwrap();
    assert_eq!(z2.freqs()[0], Complex64::new(0.0429, 0.0825));
}

#[test]
fn classify_noiseless_z1_fixture() {
    let sig = fixture("z1_noiseless.json");
    let (code, s) = crnr(&["classify", "--signal", path(&sig), "--class-file", path(&fixture("z1.json"))]);
    assert_eq!(code, 0, "{s}");
    assert_eq!(s["is_member"], Value::Bool(true), "{s}");
    assert_eq!(s["order"], 10);

    let (code, s) = crnr(&["classify", "--signal", path(&sig), "--class-file", path(&fixture("z2.json"))]);
    assert_eq!(code, 0);
    assert_eq!(s["is_member"], Value::Bool(false), "{s}");

    let (code, s) = crnr(&[
        "classify",
        "--signal",
        path(&sig),
        "--method",
        "glrt",
        "--class-file",
        path(&fixture("z1.json")),
        "--class-file",
        path(&fixture("z2.json")),
    ]);
    assert_eq!(code, 0);
    assert_eq!(s["decision"], "H1", "{s}");
}

#[test]
fn gmap_minima_sit_on_the_fixture_modes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = crnr(&["gmap", "--signal", path(&fixture("four_mode_noiseless.json")), "--out-dir", path(dir.path())]);
    assert_eq!(code, 0, "{s}");
    let rows = csv(&dir.path().join("gmap.csv"));
    assert_eq!(rows.len(), 121 * 121);
    let mut cells: Vec<(f64, f64, f64)> = rows
        .iter()
        .map(|r| (r["re"].parse().unwrap(), r["im"].parse().unwrap(), r["value"].parse().unwrap()))
        .collect();
    cells.sort_by(|a, b| a.2.total_cmp(&b.2));
    let half_step = 0.01 + 1e-9;
    for z in load_class_file(fixture("four_mode.json")).unwrap().freqs() {
        assert!(
            cells[..4].iter().any(|(re, im, _)| (re - z.re).abs() <= half_step && (im - z.im).abs() <= half_step),
            "{z} not among {:?}",
            &cells[..4]
        );
    }
    assert_eq!(fs::read_to_string(dir.path().join("singular_values.csv")).unwrap().lines().next(), Some("index,sigma"));
}

#[test]
fn sweep_error_reports_every_trial() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = crnr(&[
        "sweep-error",
        "--true-class-file",
        path(&fixture("z1.json")),
        "--class-file",
        path(&fixture("z2.json")),
        "--snr-db",
        "-5,20,inf",
        "--trials",
        "10",
        "--order",
        "10",
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("sweep_error.json")).unwrap()).unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r["trials"] == 10));
    assert_eq!(report["snr_grid"][2], "inf");
    let text = fs::read_to_string(dir.path().join("sweep_error.csv")).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("snr_db,method,error_rate,disk_center_re,disk_center_im,disk_radius,variant")
    );
}

#[test]
fn sweep_disk_writes_both_variants() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = crnr(&[
        "sweep-disk",
        "--class-file",
        path(&fixture("z1.json")),
        "--snr-db",
        "10",
        "--trials",
        "3",
        "--order",
        "10",
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(code, 0);
    let rows = csv(&dir.path().join("sweep_disk.csv"));
    let variants: Vec<&str> = rows.iter().map(|r| r["variant"].as_str()).collect();
    assert_eq!(variants, ["cadzow", "raw"]);
    assert!(rows.iter().all(|r| r["disk_radius"].parse::<f64>().unwrap() > 0.0));
}

#[test]
fn boundary_contains_the_fixture_modes() {
    // at the classification D the (-0.5, ±0.6) pair has ||Bx|| < 1 and may fall outside
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = crnr(&[
        "boundary",
        "--signal",
        path(&fixture("four_mode_noiseless.json")),
        "--class-file",
        path(&fixture("four_mode.json")),
        "--D",
        "3",
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(code, 0, "{s}");
    assert_eq!(fs::read_to_string(dir.path().join("boundary.csv")).unwrap().lines().next(), Some("re,im"));
    let doc: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("boundary.json")).unwrap()).unwrap();
    let verdicts = doc["membership"].as_array().unwrap();
    assert_eq!(verdicts.len(), 4);
    assert!(verdicts.iter().all(|m| m["verdict"] != "outside"), "{verdicts:?}");
}

#[test]
fn synth_is_deterministic_and_matches_the_cached_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let args = |name: &'static str| {
        vec![
            "synth".to_string(),
            "--class-file".into(),
            path(&fixture("z1.json")).into(),
            "--snr-db".into(),
            "20".into(),
            "--seed".into(),
            "7".into(),
            "--name".into(),
            name.into(),
            "--out-dir".into(),
            path(dir.path()).into(),
        ]
    };
    for name in ["a.json", "b.json"] {
        let a = args(name);
        let (code, _) = crnr(&a.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(code, 0);
    }
    let a = fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.json")).unwrap());

    let fresh = load_signal(dir.path().join("a.json")).unwrap();
    let cached = load_signal(fixture("z1_snr20_seed7.json")).unwrap();
    assert_eq!(fresh.len(), cached.len());
    for (x, y) in fresh.samples().iter().zip(cached.samples()) {
        assert!((x - y).norm() <= 1e-15 * x.norm().max(1.0));
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = crnr(&["classify", "--signal", "/nonexistent.json", "--class-file", path(&fixture("z1.json"))]);
    assert_eq!(code, 2);
    let (code, _) = crnr(&["frobnicate"]);
    assert_eq!(code, 2);

    // a silent signal has no pencil to scale
    let zeros = dir.path().join("zeros.json");
    fs::write(&zeros, format!(r#"{{"T": 12, "K": 1, "samples": {}}}"#, serde_json::json!(vec![[0.0, 0.0]; 12]))).unwrap();
    let (code, s) = crnr(&["classify", "--signal", path(&zeros), "--class-file", path(&fixture("z1.json")), "--order", "1"]);
    assert_eq!(code, 3, "{s}");

    // noisy data never meets the 1e-8 Cadzow criterion within two iterations
    let (code, s) = crnr(&[
        "classify",
        "--signal",
        path(&fixture("z1_snr20_seed7.json")),
        "--class-file",
        path(&fixture("z1.json")),
        "--order",
        "10",
        "--cadzow-max-iter",
        "2",
        "--require-convergence",
    ]);
    assert_eq!(code, 4, "{s}");
}
