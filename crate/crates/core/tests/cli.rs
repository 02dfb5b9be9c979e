//! End-to-end checks of the binary: formats, exit codes, workspace
//! artifacts, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn extlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extlab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn spectrum_emits_sign_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = extlab(&["spectrum", "--dim", "3", "--kmax", "6"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,lambda,err,sign"));
    let signs: Vec<&str> = lines.map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(signs, ["+", "-", "-", "-", "-", "-", "-"]);
}

#[test]
fn bessel_scan_zero_is_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = extlab(&["bessel", "--scan", "0"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("0,0,0,3.36"));
}

#[test]
fn conv_rows_have_header_and_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = extlab(
        &["conv", "--surface", "sphere2", "--fold", "3", "--steps", "4"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,closed_form,oracle,abs_error");
    assert_eq!(lines.len(), 5);
    // Without --oracle the oracle column is nan.
    assert!(lines[1].contains(",nan,"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad_surface = extlab(&["conv", "--surface", "nonsense"], dir.path());
    assert_eq!(bad_surface.status.code(), Some(1));
    let bad_flag = extlab(&["spectrum", "--dimension", "3"], dir.path());
    assert_eq!(bad_flag.status.code(), Some(1));
    let help = extlab(&["--help"], dir.path());
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn report_aggregates_and_flags_partial() {
    let dir = tempfile::tempdir().unwrap();
    // Empty workspace: error, exit 1, no report.
    let empty = extlab(&["report"], dir.path());
    assert_eq!(empty.status.code(), Some(1));

    let run = extlab(&["spectrum", "--dim", "4", "--kmax", "4"], dir.path());
    assert!(run.status.success());
    let report = extlab(&["report"], dir.path());
    assert!(report.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&report)).unwrap();
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["partial"], true);
    assert_eq!(doc["sections"]["spectrum"]["claim"], "eigenvalue-sign-table");
    assert!(doc["missing"].as_array().unwrap().len() == 6);
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "conv", "--surface", "sphere1", "--fold", "3", "--steps", "40", "--seed", "7",
    ];
    let a = extlab(&args, dir.path());
    let b = extlab(&args, dir.path());
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_cap_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_extlab"))
        .args(["spectrum", "--dim", "3", "--kmax", "2"])
        .env("EXTLAB_THREADS", "zero")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
