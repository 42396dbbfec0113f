//! Binary-level checks: byte determinism, the fixed CSV schema, and the
//! exit-code contract.

use std::process::{Command, Output};

fn spectra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectra"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn sweep_csv_is_byte_deterministic_across_thread_counts() {
    let args = [
        "sweep",
        "--constraint",
        "area",
        "--k",
        "1",
        "--m",
        "0",
        "--a",
        "1.0,1.5",
        "--mesh",
        "6,12,24",
        "--format",
        "csv",
    ];
    let first = Command::new(env!("CARGO_BIN_EXE_spectra"))
        .args(args)
        .env("SPECTRA_THREADS", "1")
        .output()
        .unwrap();
    let second = Command::new(env!("CARGO_BIN_EXE_spectra"))
        .args(args)
        .env("SPECTRA_THREADS", "4")
        .output()
        .unwrap();
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.starts_with(
        "a,b,m,lambda1_sq_minus_m2,err,lower_sq,upper_sq,improved_lower_sq,reference_iso,conjecture_margin,region_base,region_large_mass,fitted_order\n"
    ));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn fiber_lists_known_root_with_small_defect() {
    let out = spectra(&[
        "fiber", "--family", "vertical", "--a", "1", "--b", "1", "--l", "1", "--m", "0",
        "--window=-5,5", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("index,eigenvalue,energy,branch,validated,defect\n"));
    // -3pi/8 = -1.1780972450961724 appears with a tiny defect
    let row = text
        .lines()
        .find(|l| l.contains("-1.1780972450961"))
        .expect("root listed");
    let defect: f64 = row.split(',').next_back().unwrap().parse().unwrap();
    assert!(defect <= 1e-9);
}

#[test]
fn empty_window_is_success_with_note() {
    let out = spectra(&[
        "fiber", "--family", "horizontal", "--a", "1", "--b", "1", "--l", "1", "--m", "3",
        "--window=-2,2",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("no spectrum"));
}

#[test]
fn exit_code_two_for_bad_arguments() {
    // unknown flag
    let out = spectra(&["bounds", "--a", "1"]);
    assert_eq!(out.status.code(), Some(2));
    // invalid triangle
    let out = spectra(&["bounds", "--a=-1", "--b", "1"]);
    assert_eq!(out.status.code(), Some(2));
    // sweep grid outside the admissible interval
    let out = spectra(&[
        "sweep",
        "--constraint",
        "perimeter",
        "--k",
        "1",
        "--a",
        "2.0",
        "--mesh",
        "6,12,24",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8(out.stderr).unwrap();
    assert!(msg.contains("admissible interval"), "{msg}");
    // non-geometric ladder
    let out = spectra(&["lambda1", "--a", "1", "--b", "1", "--mesh", "10,20,30"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_three_for_io_failure() {
    let out = spectra(&[
        "bounds",
        "--a",
        "1",
        "--b",
        "1",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bounds_csv_has_improved_cell_only_above_threshold() {
    let low = spectra(&["bounds", "--a", "1", "--b", "1", "--m", "0", "--format", "csv"]);
    let text = String::from_utf8(low.stdout).unwrap();
    let cells: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(cells[5], "");
    let high = spectra(&["bounds", "--a", "1", "--b", "1", "--m", "2", "--format", "csv"]);
    let text = String::from_utf8(high.stdout).unwrap();
    let cells: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!(cells[5].starts_with("3.084251375340424"));
}

#[test]
fn perimeter_paper_mode_is_exposed() {
    let out = spectra(&[
        "sweep",
        "--constraint",
        "perimeter-paper",
        "--k",
        "1",
        "--a",
        "1.0",
        "--mesh",
        "6,12,24",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    let b: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    // linear-leg partner: b = (2 + sqrt(2)) - 1
    assert!((b - (1.0 + std::f64::consts::SQRT_2)).abs() < 1e-12);
}

#[test]
fn polygon_command_runs_on_square() {
    let out = spectra(&[
        "polygon",
        "--vertices",
        "0,0;1,0;1,1;0,1",
        "--mesh",
        "2,3",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("refinement,subdivisions,dim,nu_min\n"));
    assert_eq!(text.lines().count(), 3);
    for line in text.lines().skip(1) {
        let nu: f64 = line.split(',').next_back().unwrap().parse().unwrap();
        assert!(nu > 0.0);
    }
}
