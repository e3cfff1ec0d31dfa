//! Behavioral tests of the `dqd` binary: exit codes, config handling,
//! flag precedence, and the row format of each subcommand.

use std::path::Path;
use std::process::{Command, Output};

fn dqd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqd"))
        .args(args)
        .output()
        .unwrap()
}

fn dqd_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqd"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process killed by signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Splits a solve/sweep result document into header names and data rows.
fn parse_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# format=1"));
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn field<'a>(header: &[String], row: &'a [String], name: &str) -> &'a str {
    let k = header.iter().position(|h| h == name).unwrap();
    &row[k]
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&dqd(&["--help"])), 0);
    assert_eq!(code(&dqd(&["--version"])), 0);
    assert_eq!(code(&dqd(&["solve", "--help"])), 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&dqd(&["frobnicate"])), 2);
    assert_eq!(code(&dqd(&["sweep", "--axis", "t"])), 2); // grid keys missing
    assert_eq!(code(&dqd(&["sweep", "--axis", "q", "--min", "1", "--max", "2", "--count", "3"])), 2);
}

#[test]
fn unknown_topology_is_a_config_error_naming_the_value() {
    let out = dqd(&["solve", "--topology", "moebius"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("moebius"));
    assert!(stderr(&out).contains("topology"));
}

#[test]
fn config_errors_name_key_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "[model]\nt = 0.1\nbandwidth = 4\n").unwrap();
    let out = dqd(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("bandwidth"), "stderr: {err}");
    assert!(err.contains("line 3"), "stderr: {err}");
}

#[test]
fn sweep_grid_is_validated() {
    let base = ["sweep", "--axis", "t", "--min", "0.1", "--max", "0.2"];
    let mut one = base.to_vec();
    one.extend(["--count", "1"]);
    assert_eq!(code(&dqd(&one)), 2);

    let mut log_zero = ["sweep", "--axis", "t", "--min", "0", "--max", "0.2", "--count", "5"].to_vec();
    log_zero.extend(["--spacing", "log"]);
    assert_eq!(code(&dqd(&log_zero)), 2);
}

#[test]
fn corrupted_oracle_check_exits_one() {
    let out = dqd(&["oracle-check", "--seed", "42", "--count", "50", "--corrupt"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL"));

    let ok = dqd(&["oracle-check", "--seed", "42", "--count", "50"]);
    assert_eq!(code(&ok), 0);
    assert!(stdout(&ok).contains("PASS"));
}

#[test]
fn exhausted_dense_budget_exits_three() {
    let out = dqd(&[
        "solve", "--leads", "2", "--temperature", "0.01", "--dense-cap", "10",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn negative_flag_values_parse() {
    let out = dqd(&["solve", "--leads", "0", "--b", "-0.1", "--eps-d", "-0.2"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn bare_pair_row_reports_exact_unit_concurrence() {
    let out = dqd(&["solve", "--leads", "0", "--t", "0.1", "--u", "0.4"]);
    assert_eq!(code(&out), 0);
    let (header, rows) = parse_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    assert_eq!(field(&header, &rows[0], "concurrence"), "1.00000000000e0");
    assert_eq!(field(&header, &rows[0], "j"), "1.00000000000e-1");
    assert_eq!(field(&header, &rows[0], "status"), "ok");
}

#[test]
fn detached_leads_reproduce_the_bare_pair() {
    let common = ["--t", "0.07", "--u", "0.5", "--temperature", "0.02", "--b", "0.005"];
    let mut with_leads = vec!["solve", "--leads", "2", "--t-prime", "0"];
    with_leads.extend(common);
    let mut bare = vec!["solve", "--leads", "0"];
    bare.extend(common);

    let a = dqd(&with_leads);
    let b = dqd(&bare);
    assert_eq!(code(&a), 0);
    assert_eq!(code(&b), 0);
    let (header, rows_a) = parse_rows(&stdout(&a));
    let (_, rows_b) = parse_rows(&stdout(&b));
    for name in ["concurrence", "spin_dot", "p_ud", "p_par", "dn2_a", "n_a"] {
        let va: f64 = field(&header, &rows_a[0], name).parse().unwrap();
        let vb: f64 = field(&header, &rows_b[0], name).parse().unwrap();
        assert!(
            (va - vb).abs() <= 1e-10,
            "{name}: {va} with detached leads vs {vb} bare"
        );
    }
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("point.cfg");
    std::fs::write(&cfg, "[model]\nt = 0.05\nu = 0.4\n# comment line\nleads = 0\n").unwrap();
    let out = dqd_in(
        dir.path(),
        &["solve", "--config", "point.cfg", "--t", "0.1"],
    );
    assert_eq!(code(&out), 0);
    let (header, rows) = parse_rows(&stdout(&out));
    assert_eq!(field(&header, &rows[0], "t"), "1.00000000000e-1");
    assert_eq!(field(&header, &rows[0], "u"), "4.00000000000e-1");
}

#[test]
fn per_row_failures_are_marked_not_fatal() {
    let out = dqd(&[
        "sweep", "--leads", "2", "--max-sites", "4", "--axis", "t",
        "--min", "0.05", "--max", "0.1", "--count", "3",
    ]);
    assert_eq!(code(&out), 0);
    let (header, rows) = parse_rows(&stdout(&out));
    assert_eq!(rows.len(), 3);
    for row in &rows {
        assert_eq!(field(&header, row, "status"), "error:site_gate");
        assert_eq!(field(&header, row, "concurrence"), "NaN");
    }
}

#[test]
fn scale_report_row_is_consistent() {
    let out = dqd(&["scales", "--u", "1", "--gamma", "0.0625", "--j", "0.01"]);
    assert_eq!(code(&out), 0);
    let (header, rows) = parse_rows(&stdout(&out));
    let tk: f64 = field(&header, &rows[0], "t_k").parse().unwrap();
    let jc: f64 = field(&header, &rows[0], "j_c_series").parse().unwrap();
    assert!((tk - 3.3013e-4).abs() <= 1e-8);
    assert!((jc / tk - 2.5).abs() <= 1e-9);
}

#[test]
fn repulsion_sweep_keeps_half_filling() {
    let out = dqd(&[
        "sweep", "--leads", "0", "--t", "0.1", "--axis", "u",
        "--min", "0.2", "--max", "0.8", "--count", "5",
    ]);
    assert_eq!(code(&out), 0);
    let (header, rows) = parse_rows(&stdout(&out));
    for row in &rows {
        let n_a: f64 = field(&header, row, "n_a").parse().unwrap();
        assert!((n_a - 1.0).abs() <= 1e-10, "n_a = {n_a} off half filling");
    }
}

#[test]
fn phase_rows_flag_missing_crossings_explicitly() {
    let out = dqd(&[
        "phase", "--leads", "1", "--u-over-gamma", "8",
        "--t-lo", "0.05", "--t-hi", "0.4",
    ]);
    assert_eq!(code(&out), 0);
    let (header, rows) = parse_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    assert_eq!(field(&header, &rows[0], "status"), "ok");
    let tc: f64 = field(&header, &rows[0], "t_c_numeric").parse().unwrap();
    assert!(tc > 0.2 && tc < 0.23, "onset hopping {tc} outside (0.2, 0.23)");
    // The spin correlator never reaches -1/4 inside this bracket.
    assert_eq!(field(&header, &rows[0], "j_quarter"), "NaN");
}
