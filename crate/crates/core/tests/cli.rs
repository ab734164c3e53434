//! End-to-end tests of the `qcausality` binary: exit-code contract,
//! CSV/JSON output shape, and determinism.

use std::path::Path;
use std::process::{Command, Output};

use qcausality::cli::{write_map_file, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION};
use qcausality::maps::{random_kraus_channel, sub_rng, QuantumMap};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qcausality"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn qcausality")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

/// Parses CSV rows (after the header) into (phi, theta, p_A, p_B, signal).
fn parse_csv(text: &str) -> Vec<[f64; 5]> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("phi,theta,p_A,p_B,signal"));
    lines
        .map(|line| {
            let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
            fields.try_into().unwrap()
        })
        .collect()
}

#[test]
fn scan_default_emits_8x8_csv_to_stdout() {
    let out = run(&["scan", "--out", "-"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let rows = parse_csv(&stdout(&out));
    assert_eq!(rows.len(), 64);
    for row in &rows {
        assert!((0.0..=1.0).contains(&row[2]));
        assert!((0.0..=1.0).contains(&row[3]));
    }
}

#[test]
fn scan_hm_preset_has_null_at_equal_coefficients() {
    // With theta in steps of pi/4 the grid contains theta = pi/4, where
    // the two probe coefficients coincide and the nonlinear signal must
    // vanish.
    let out = run(&["scan", "--map", "hm-eq12", "--theta-steps", "8", "--out", "-"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let rows = parse_csv(&stdout(&out));
    let quarter = std::f64::consts::FRAC_PI_4;
    let mut seen = 0;
    for row in rows.iter().filter(|r| (r[1] - quarter).abs() < 1e-12) {
        assert!(row[4].abs() < 1e-12, "signal {} at theta = pi/4", row[4]);
        seen += 1;
    }
    assert_eq!(seen, 8);
}

#[test]
fn scan_with_linear_map_file_matches_identity_scan() {
    let dir = tempfile::tempdir().unwrap();
    let map_path = dir.path().join("channel.json");
    let mut rng = sub_rng(99, 0);
    write_map_file(
        &map_path,
        &QuantumMap::Kraus(random_kraus_channel(3, &mut rng)),
    )
    .unwrap();

    let identity = run(&["scan", "--out", "-"]);
    let spec = format!("kraus:{}", map_path.display());
    let channel = run(&["scan", "--map", &spec, "--out", "-"]);
    assert_eq!(identity.status.code(), Some(EXIT_OK));
    assert_eq!(channel.status.code(), Some(EXIT_OK));

    let a = parse_csv(&stdout(&identity));
    let b = parse_csv(&stdout(&channel));
    assert_eq!(a.len(), b.len());
    for (ra, rb) in a.iter().zip(&b) {
        for k in 0..5 {
            assert!((ra[k] - rb[k]).abs() < 1e-10);
        }
    }
}

#[test]
fn scan_json_format_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.json");
    std::fs::write(
        &cfg_path,
        r#"{"v": [0.1, 0.0], "phi_steps": 4, "theta_steps": 2, "format": "json"}"#,
    )
    .unwrap();
    let out = run(&["scan", "--config", cfg_path.to_str().unwrap(), "--out", "-"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["metadata"]["phi_points"], 4);
    assert_eq!(v["rows"].as_array().unwrap().len(), 8);
}

#[test]
fn scan_rejects_zero_steps_and_bad_map() {
    let out = run(&["scan", "--phi-steps", "0", "--out", "-"]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    let out = run(&["scan", "--map", "no-such-map.json", "--out", "-"]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
}

#[test]
fn verify_nosignal_passes_and_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let r1 = dir.path().join("r1.json");
    let r2 = dir.path().join("r2.json");
    for path in [&r1, &r2] {
        let out = run(&[
            "verify-nosignal",
            "--samples",
            "60",
            "--seed",
            "11",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(EXIT_OK));
    }
    let b1 = std::fs::read(&r1).unwrap();
    let b2 = std::fs::read(&r2).unwrap();
    assert_eq!(b1, b2);
    let v: serde_json::Value = serde_json::from_slice(&b1).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["max_deviation"].as_f64().unwrap() < 1e-9);
}

#[test]
fn verify_nosignal_rejects_zero_samples() {
    let out = run(&["verify-nosignal", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
}

#[test]
fn verify_nosignal_reports_violation_with_exit_1() {
    // An absurdly tight tolerance turns ordinary rounding noise into a
    // reported violation, exercising the exit-1 path.
    let out = run(&["verify-nosignal", "--samples", "5", "--tol", "1e-40", "--out", "-"]);
    assert_eq!(out.status.code(), Some(EXIT_VIOLATION));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["pass"], false);
    assert!(v["worst_channel"].is_object());
}

#[test]
fn classify_presets_and_files() {
    let out = run(&["classify", "--map", "hm-eq12", "--samples", "60", "--out", "-"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["class_label"], "signaling");
    assert!(v["signaling_deviation"].as_f64().unwrap() > 1e-6);

    let out = run(&["classify", "--map", "identity", "--samples", "60", "--out", "-"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["class_label"], "linear");

    let dir = tempfile::tempdir().unwrap();
    let map_path = dir.path().join("channel.json");
    let mut rng = sub_rng(77, 0);
    write_map_file(
        &map_path,
        &QuantumMap::Kraus(random_kraus_channel(3, &mut rng)),
    )
    .unwrap();
    let out = run(&["classify", "--map", map_path.to_str().unwrap(), "--samples", "60", "--out", "-"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["class_label"], "linear");
}

#[test]
fn classify_rejects_malformed_map_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind": "kraus", "dim": 3}"#).unwrap();
    let out = run(&["classify", "--map", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));

    std::fs::write(&bad, "not json at all").unwrap();
    let out = run(&["classify", "--map", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
}

#[test]
fn demo_writes_both_surfaces() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["demo", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    for name in ["demo_linear.csv", "demo_hm.csv"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert_eq!(parse_csv(&text).len(), 64 * 64, "{name}");
    }
    assert!(no_tmp_files(dir.path()));
}

fn no_tmp_files(dir: &Path) -> bool {
    std::fs::read_dir(dir)
        .unwrap()
        .all(|e| !e.unwrap().file_name().to_string_lossy().ends_with(".tmp"))
}
