//! Black-box tests of the command-line interface: each test invokes the
//! compiled binary and checks exit status, CSV shapes and manifest keys.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn genaf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genaf"))
        .args(args)
        .output()
        .expect("failed to launch the binary")
}

fn expect_success(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

fn manifest_value<'a>(manifest: &'a str, key: &str) -> &'a str {
    manifest
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("manifest key {key} missing in:\n{manifest}"))
}

#[test]
fn run_writes_snapshot_steplog_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = genaf(&[
        "run",
        "--problem",
        "cone",
        "--order",
        "3",
        "--nx",
        "8",
        "--ny",
        "8",
        "--t-end",
        "0.05",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    expect_success(&out);

    let snapshot = read(dir.path(), "snapshot.csv");
    let mut lines = snapshot.lines();
    assert_eq!(lines.next().unwrap(), "i,j,x,y,q");
    assert_eq!(lines.count(), 64);

    let steplog = read(dir.path(), "steplog.csv");
    let mut lines = steplog.lines();
    assert_eq!(lines.next().unwrap(), "step,t,dt,mass_q,max_abs");
    assert!(lines.count() >= 2);

    let manifest = read(dir.path(), "manifest.txt");
    assert_eq!(manifest_value(&manifest, "problem"), "cone");
    assert_eq!(manifest_value(&manifest, "order"), "3");
    assert_eq!(manifest_value(&manifest, "nx"), "8");
    let err: f64 = manifest_value(&manifest, "l1_error_q").parse().unwrap();
    assert!(err.is_finite() && err >= 0.0);
}

#[test]
fn converge_reports_decreasing_error_and_an_eoc() {
    let dir = tempfile::tempdir().unwrap();
    let out = genaf(&[
        "converge",
        "--order",
        "3",
        "--grids",
        "16,32",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    expect_success(&out);

    let table = read(dir.path(), "converge.csv");
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows[0], "h,e_l1,eoc");
    assert_eq!(rows.len(), 3);
    let field = |row: &str, k: usize| row.split(',').nth(k).unwrap().to_string();
    let e1: f64 = field(rows[1], 1).parse().unwrap();
    let e2: f64 = field(rows[2], 1).parse().unwrap();
    assert!(e2 < e1, "no error reduction: {e1} -> {e2}");
    assert_eq!(field(rows[1], 2), "");
    let eoc: f64 = field(rows[2], 2).parse().unwrap();
    assert!(eoc > 1.0, "implausible EOC {eoc}");
}

#[test]
fn spectrum_reports_a_stable_operator_of_the_right_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let out = genaf(&[
        "spectrum",
        "--order",
        "3",
        "--nx",
        "3",
        "--ny",
        "3",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    expect_success(&out);

    let manifest = read(dir.path(), "manifest.txt");
    let dim: usize = manifest_value(&manifest, "dim").parse().unwrap();
    assert_eq!(manifest_value(&manifest, "stable"), "true");
    let table = read(dir.path(), "spectrum.csv");
    assert_eq!(table.lines().count(), dim + 1);
    assert_eq!(table.lines().next().unwrap(), "re,im");
}

#[test]
fn dtmax_finds_a_positive_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = genaf(&[
        "dtmax",
        "--order",
        "3",
        "--nx",
        "3",
        "--ny",
        "3",
        "--theta",
        "0.785398163",
        "--increment",
        "0.001",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    expect_success(&out);

    let manifest = read(dir.path(), "manifest.txt");
    let dt: f64 = manifest_value(&manifest, "dt_max").parse().unwrap();
    assert!(dt > 0.0 && dt.is_finite());
    let table = read(dir.path(), "dtmax.csv");
    assert_eq!(table.lines().count(), 2);
    assert_eq!(table.lines().next().unwrap(), "theta,increment,dt_max,cfl_x,cfl_y");
}

#[test]
fn cflmap_scans_the_requested_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let out = genaf(&[
        "cflmap",
        "--order",
        "3",
        "--nx",
        "3",
        "--ny",
        "3",
        "--cfl-max",
        "0.1",
        "--cfl-step",
        "0.05",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    expect_success(&out);

    let manifest = read(dir.path(), "manifest.txt");
    assert_eq!(manifest_value(&manifest, "points"), "9");
    // The whole lattice sits far inside the order-3 stability region.
    assert_eq!(manifest_value(&manifest, "stable_points"), "9");
    let table = read(dir.path(), "cflmap.csv");
    assert_eq!(table.lines().count(), 10);
}

#[test]
fn config_file_supplies_defaults_and_flags_take_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("case.cfg");
    fs::write(&cfg, "order=4\nnx=6\nny=6\nproblem=cone\nt_end=0.02\n").unwrap();
    let out = genaf(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--order",
        "3",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    expect_success(&out);

    let manifest = read(dir.path(), "manifest.txt");
    assert_eq!(manifest_value(&manifest, "order"), "3");
    assert_eq!(manifest_value(&manifest, "nx"), "6");
    assert_eq!(manifest_value(&manifest, "problem"), "cone");
}

#[test]
fn unknown_problem_fails_with_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = genaf(&[
        "run",
        "--problem",
        "bogus",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.starts_with("error: config:"),
        "unexpected stderr: {stderr}"
    );
}

#[test]
fn element_dump_lists_every_dof() {
    let dir = tempfile::tempdir().unwrap();
    let out = genaf(&[
        "element-dump",
        "--order",
        "4",
        "--moments",
        "tensor",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    expect_success(&out);

    let manifest = read(dir.path(), "manifest.txt");
    let n_dofs: usize = manifest_value(&manifest, "n_dofs").parse().unwrap();
    let table = read(dir.path(), "element.csv");
    assert_eq!(table.lines().next().unwrap(), "dof,kind,edge,a,k,l,xi,eta");
    assert_eq!(table.lines().count(), n_dofs + 1);
}
