//! End-to-end checks of the binary: artifact layout, determinism, and the
//! exit-code contract.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_affine-fourier"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn det_cylinder_prints_probability() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("dc");
    let out = run(&[
        "det-cylinder",
        "--kernel",
        r#"{"variant":"diagonal","p":0.5}"#,
        "--cyl",
        r#"{"F":[1,2],"xi":[1,0]}"#,
        "--out",
        base.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout.starts_with("2.5000000000000000e-1"),
        "stdout: {stdout}"
    );
    assert!(base.with_extension("csv").exists());
    assert!(base.with_extension("json").exists());
}

#[test]
fn malformed_polynomial_exits_2_without_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("bad");
    let out = run(&[
        "pisot-certify",
        "--poly",
        "x^2 - ",
        "--out",
        base.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!base.with_extension("csv").exists());
    assert!(!base.with_extension("json").exists());
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_spectrum_violation_exits_3() {
    // passes the order-16 construction check, fails at the ladder's order
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("spec");
    let out = run(&[
        "induced-transform",
        "--kernel",
        r#"{"variant":"toeplitz_general","p":0.08,"a":0.9}"#,
        "--lambda",
        "0.5",
        "--grid",
        "1:1:1",
        "--out",
        base.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn identical_config_gives_byte_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let run_once = |name: &str| -> Vec<u8> {
        let base = dir.path().join(name);
        let out = run(&[
            "erdos-scan",
            "--poly",
            "x^2 - x - 1",
            "--kmax",
            "10",
            "--out",
            base.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        std::fs::read(base.with_extension("csv")).unwrap()
    };
    assert_eq!(run_once("a"), run_once("b"));

    let sampled = |name: &str| -> Vec<u8> {
        let base = dir.path().join(name);
        let out = run(&[
            "ifs-transform",
            "--spec",
            r#"{"dim":1,"A":[3.0],"B":[[-1.0],[1.0]],"p":[0.5,0.5]}"#,
            "--xi",
            "1.0",
            "--sample",
            "2000",
            "--seed",
            "7",
            "--out",
            base.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        std::fs::read(base.with_extension("samples.csv")).unwrap()
    };
    assert_eq!(sampled("s1"), sampled("s2"));
}

#[test]
fn csv_round_trips_at_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("rt");
    let out = run(&[
        "induced-transform",
        "--kernel",
        r#"{"variant":"toeplitz","a":0.4}"#,
        "--lambda",
        "0.5",
        "--grid",
        "-2:2:9",
        "--out",
        base.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(base.with_extension("csv")).unwrap();
    for line in text.lines().skip(1) {
        for field in line.split(',') {
            if field.contains('e') {
                let v: f64 = field.parse().unwrap();
                assert_eq!(format!("{v:.16e}"), field, "field {field}");
            }
        }
    }
}

#[test]
fn env_var_sets_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("AFFINE_FOURIER_OUT", dir.path())
        .args(["pisot-trace", "--poly", "[1,-1,-1]", "--kmax", "6"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = dir.path().join("pisot-trace.csv");
    assert!(csv.exists());
    let text = std::fs::read_to_string(csv).unwrap();
    // header + k = 0..=6, trace column holds exact integers
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    assert!(lines[5].starts_with("4,7,"), "line: {}", lines[5]);
}

#[test]
fn pisot_rejection_is_a_verdict_not_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("rej");
    let out = run(&[
        "pisot-certify",
        "--poly",
        "x^2 - 2",
        "--out",
        base.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let header: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(base.with_extension("json")).unwrap())
            .unwrap();
    assert_eq!(
        header["result"]["certified"],
        serde_json::Value::Bool(false)
    );
}

#[test]
fn erdos_scan_header_records_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("hdr");
    let out = run(&[
        "erdos-scan",
        "--poly",
        "x^2 - x - 1",
        "--system",
        "simplex:2",
        "--kmax",
        "6",
        "--out",
        base.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let header: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(base.with_extension("json")).unwrap())
            .unwrap();
    assert!(header["result"]["theta"].as_f64().unwrap() > 0.0);
    assert!(header["result"]["certified_floor"].as_f64().unwrap() > 0.0);
    assert!(
        header["result"]["certified_floor"].as_f64().unwrap()
            <= header["result"]["empirical_floor"].as_f64().unwrap()
    );
}
