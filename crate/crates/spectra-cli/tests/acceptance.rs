//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line with the measured quantities. Run with `--nocapture` to see every
//! line; tolerances are pinned in code.

use spectra_core::bounds::{
    eccentric_region, lower_bound_sq, upper_bound_sq, ConstraintFamily, RegionVariant,
};
use spectra_core::dirac1d::{
    closest_to_zero, eigenvalues_in_window, shooting_eigenvalues, FiberFamily, FiberProblem,
    mass_threshold_m0,
};
use spectra_core::dirac2d::{
    assemble_form, build_mesh, build_polygon_mesh, lambda1_ladder, psi_o, rayleigh_quotient,
    symmetric_eigenvalues_dense, Polygon,
};
use spectra_core::{ConstraintKind, ConstraintSpec, Mass, RightTriangle};
use std::f64::consts::PI;
use std::time::Instant;

fn tri(a: f64, b: f64) -> RightTriangle {
    RightTriangle::new(a, b).unwrap()
}

fn mass(m: f64) -> Mass {
    Mass::new(m).unwrap()
}

fn fiber(family: FiberFamily, a: f64, b: f64, l: f64, m: f64) -> FiberProblem {
    FiberProblem::new(family, &tri(a, b), l, mass(m)).unwrap()
}

fn first_energy(family: FiberFamily, a: f64, b: f64, l: f64, m: f64) -> f64 {
    let p = fiber(family, a, b, l, m);
    let cap = (m * m + (2.5 * PI / l).powi(2)).sqrt();
    let spec = eigenvalues_in_window(&p, (-cap, cap), 32).unwrap();
    closest_to_zero(&spec).unwrap().eigenvalue.energy
}

fn report(criterion: &str, ok: bool, detail: &str, elapsed: std::time::Duration) -> bool {
    println!(
        "criterion {criterion}: {} — {detail} [{:.2}s]",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    ok
}

#[test]
fn criterion_01_exact_vertical_root() {
    let t0 = Instant::now();
    let e1 = first_energy(FiberFamily::Vertical, 1.0, 1.0, 1.0, 0.0);
    let expected = (3.0 * PI / 8.0) * (3.0 * PI / 8.0);
    let dev = (e1 - expected).abs();
    let elapsed = t0.elapsed();
    let ok = dev <= 1e-10 && elapsed.as_secs_f64() < 1.0;
    assert!(report(
        "1",
        ok,
        &format!("E1 = {e1:.12} vs (3pi/8)^2 = {expected:.12}, |dev| = {dev:.2e}"),
        elapsed
    ));
}

#[test]
fn criterion_02_secular_vs_shooting() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for ratio in [0.5, 1.0, 2.0] {
        for m in [0.0, 1.0, 5.0] {
            for family in [FiberFamily::Vertical, FiberFamily::Horizontal] {
                let p = fiber(family, ratio, 1.0, 1.0, m);
                let cap = (m * m + (6.0 * PI).powi(2)).sqrt();
                let secular = eigenvalues_in_window(&p, (-cap, cap), 5).unwrap();
                let shot = shooting_eigenvalues(&p, (-cap, cap), 5).unwrap();
                assert_eq!(secular.eigenvalues.len(), 5);
                assert_eq!(shot.len(), 5);
                for (s, t) in secular.eigenvalues.iter().zip(&shot) {
                    worst = worst.max((s.value - t).abs() / s.value.abs());
                }
            }
        }
    }
    let elapsed = t0.elapsed();
    let ok = worst <= 1e-8 && elapsed.as_secs_f64() < 10.0;
    assert!(report(
        "2",
        ok,
        &format!("first 5 roots, 18 configurations, worst relative deviation {worst:.2e}"),
        elapsed
    ));
}

#[test]
fn criterion_03_threshold_point_energy() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for (a, b) in [(1.0, 1.0), (2.0, 1.0)] {
        let p0 = fiber(FiberFamily::Horizontal, a, b, 1.0, 0.0);
        let m0 = mass_threshold_m0(&p0).unwrap();
        let f1 = first_energy(FiberFamily::Horizontal, a, b, 1.0, m0);
        worst = worst.max((f1 - PI * PI / 4.0).abs());
    }
    let elapsed = t0.elapsed();
    let ok = worst <= 1e-8;
    assert!(report(
        "3",
        ok,
        &format!("F1(m0) vs pi^2/4, worst |dev| = {worst:.2e}"),
        elapsed
    ));
}

#[test]
fn criterion_04_monotone_fiber_energies() {
    let t0 = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for (a, b) in [(1.0, 1.0), (2.0, 1.0)] {
        for family in [FiberFamily::Vertical, FiberFamily::Horizontal] {
            let mut last = f64::NEG_INFINITY;
            for i in 0..=20 {
                let m = 0.5 * i as f64;
                let e = first_energy(family, a, b, 1.0, m);
                if e < last - 1e-10 {
                    ok = false;
                    detail = format!("{family:?} (a,b)=({a},{b}) decreased at m={m}");
                }
                if family == FiberFamily::Horizontal
                    && !(e > PI * PI / 16.0 && e < PI * PI)
                {
                    ok = false;
                    detail = format!("F1 out of range at (a,b,m)=({a},{b},{m}): {e}");
                }
                last = e;
            }
        }
    }
    if detail.is_empty() {
        detail = "E1 and F1 nondecreasing over m in {0,0.5,...,10}; F1 in (pi^2/16, pi^2)".into();
    }
    assert!(report("4", ok, &detail, t0.elapsed()));
}

#[test]
fn criterion_05_horizontal_large_mass_limit() {
    let t0 = Instant::now();
    let f1 = first_energy(FiberFamily::Horizontal, 1.0, 1.0, 1.0, 100.0);
    let dev = (f1 - PI * PI).abs() / (PI * PI);
    let ok = dev <= 0.05;
    assert!(report(
        "5",
        ok,
        &format!("F1(m=100) = {f1:.6}, relative distance to pi^2: {dev:.4}"),
        t0.elapsed()
    ));
}

#[test]
fn criterion_06_sandwich_for_extrapolated_2d() {
    let t0 = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    for (a, b) in [(1.0, 1.0), (2.0, 1.0), (4.0, 1.0)] {
        for m in [0.0, 1.0] {
            let t = tri(a, b);
            let ladder = lambda1_ladder(&t, mass(m), &[24, 48, 96]).unwrap();
            let nu = ladder.extrapolation.value;
            let err = ladder.extrapolation.error_bound;
            let lo = lower_bound_sq(&t);
            let hi = upper_bound_sq(&t);
            let inside = nu + err >= lo && nu - err <= hi;
            ok &= inside;
            lines.push(format!(
                "(a={a},b={b},m={m}): {lo:.4} <= {nu:.6}+-{err:.1e} <= {hi:.4} {}",
                if inside { "ok" } else { "VIOLATED" }
            ));
        }
    }
    let elapsed = t0.elapsed();
    ok &= elapsed.as_secs_f64() < 300.0;
    assert!(report("6", ok, &lines.join("; "), elapsed));
}

#[test]
fn criterion_07_dirichlet_limit_2d() {
    // The criterion pins m = 50 and a 5% tolerance. The extrapolated value
    // is mesh-converged (order ~2, stable under ladder refinement) and sits
    // ~6.5% below 5 pi^2: the large-mass limit has not yet reached 5% at
    // m = 50, so this criterion fails on the true spectrum, not on solver
    // error (at m = 100 the same pipeline is ~3.3% away and would pass).
    let t0 = Instant::now();
    let t = tri(1.0, 1.0);
    let ladder = lambda1_ladder(&t, mass(50.0), &[24, 48, 96]).unwrap();
    let nu = ladder.extrapolation.value;
    let target = 5.0 * PI * PI;
    let dev = (nu - target).abs() / target;
    let ok = dev <= 0.05;
    assert!(report(
        "7",
        ok,
        &format!(
            "lambda1^2 - m^2 = {nu:.6} (order {:?}, err {:.1e}) vs 5pi^2 = {target:.6}, relative deviation {dev:.4} (tolerance 0.05)",
            ladder.extrapolation.order,
            ladder.extrapolation.error_bound
        ),
        t0.elapsed()
    ));
}

#[test]
fn criterion_08_trial_function_quotient() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for (a, b) in [(1.0, 1.0), (2.0, 1.0)] {
        for m in [0.0, 1.0] {
            let t = tri(a, b);
            let q = rayleigh_quotient(&t, mass(m), &psi_o(&t)).unwrap();
            let expected = 2.5 * PI * PI * (1.0 / (a * a) + 1.0 / (b * b));
            worst = worst.max(((q - m * m) - expected).abs() / expected);
        }
    }
    let ok = worst <= 1e-6;
    assert!(report(
        "8",
        ok,
        &format!("psi_o quotient vs (5pi^2/2)(1/a^2 + 1/b^2), worst relative dev {worst:.2e}"),
        t0.elapsed()
    ));
}

#[test]
fn criterion_09_classifier_regression() {
    let t0 = Instant::now();
    use ConstraintFamily::*;
    use RegionVariant::*;
    let mut ok = true;
    // a = 9, k = 1, area base, via 1/81 + 81 >= 80
    ok &= eccentric_region(9.0, 1.0, Area, Base).holds;
    ok &= 1.0 / 81.0 + 81.0 >= 80.0;
    // a = 3.5, k = 1, perimeter base
    ok &= eccentric_region(3.5, 1.0, Perimeter, Base).holds;
    // a = 1/5, k = 1, large mass
    ok &= eccentric_region(0.2, 1.0, Area, LargeMass).holds;
    ok &= eccentric_region(0.2, 1.0, Perimeter, LargeMass).holds;
    // a = 1: everything false
    for fam in [Area, Perimeter] {
        for var in [Base, LargeMass] {
            ok &= !eccentric_region(1.0, 1.0, fam, var).holds;
        }
    }
    assert!(report(
        "9",
        ok,
        "thresholds 9k, 3.5k, k/9, k/5 and the isosceles point",
        t0.elapsed()
    ));
}

#[test]
fn criterion_10_conjecture_evidence_sweep() {
    let t0 = Instant::now();
    let spec = ConstraintSpec::new(ConstraintKind::Area, 1.0).unwrap();
    let records = spectra_cli::run_sweep(
        &spec,
        &[1.25, 1.5, 2.0, 3.0],
        Mass::ZERO,
        &[24, 48, 96],
    )
    .unwrap();
    let mut ok = true;
    let mut lines = Vec::new();
    for r in &records {
        let margin = r.conjecture_margin.unwrap();
        let bar = r.margin_err.unwrap();
        let fine = margin > 0.0 && margin > bar;
        ok &= fine;
        lines.push(format!(
            "a={}: margin {margin:.5} vs bar {bar:.1e} {}",
            r.a,
            if fine { "ok" } else { "NOT CONCLUSIVE" }
        ));
    }
    assert!(report(
        "10",
        ok,
        &format!("numerical evidence only, not proof: {}", lines.join("; ")),
        t0.elapsed()
    ));
}

#[test]
fn criterion_11_discrete_operator_floor() {
    let t0 = Instant::now();
    // deterministic pseudo-random configurations
    let mut state = 0x243F6A8885A308D3u64;
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for _ in 0..10 {
        let a = 0.3 + 3.0 * next();
        let b = 0.3 + 3.0 * next();
        let m = 8.0 * next();
        let n = 4 + (next() * 6.0) as usize;
        let mesh = build_mesh(&tri(a, b), n);
        let form = assemble_form(&mesh, mass(m)).unwrap();
        let eigs = symmetric_eigenvalues_dense(&form.energy.realified());
        let floor = -1e-10 * form.a_norm();
        worst = worst.min(eigs[0] - floor);
        ok &= eigs[0] >= floor;
    }
    assert!(report(
        "11",
        ok,
        &format!("min eig(A - m^2 B) >= -1e-10 ||A|| on 10 random configs (worst slack {worst:.2e})"),
        t0.elapsed()
    ));
}

#[test]
fn criterion_12_polygon_consistency() {
    let t0 = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    // triangle: named phases vs phases recomputed from outward normals,
    // assembled on the identical mesh
    for (a, b) in [(1.0, 1.0), (2.0, 1.0)] {
        let mesh = build_mesh(&tri(a, b), 12);
        let generic = mesh.with_phases_from_normals();
        let f1 = assemble_form(&mesh, mass(0.9)).unwrap();
        let f2 = assemble_form(&generic, mass(0.9)).unwrap();
        let diff = f1.max_entry_diff(&f2);
        ok &= diff <= 1e-12;
        details.push(format!("triangle({a},{b}) entrywise diff {diff:.1e}"));
    }
    // pentagon with one vertex on each axis side, counterclockwise
    let pent = Polygon::new(vec![
        [0.0, 0.0],
        [2.0, 0.0],
        [4.0, 1.0],
        [3.0, 2.5],
        [1.0, 2.0],
    ])
    .unwrap();
    let mesh = build_polygon_mesh(&pent, 2).unwrap();
    let form = assemble_form(&mesh, mass(1.2)).unwrap();
    let eigs = symmetric_eigenvalues_dense(&form.energy.realified());
    let floor = -1e-10 * form.a_norm();
    ok &= eigs[0] >= floor;
    details.push(format!(
        "pentagon min eig(A - m^2 B) = {:.3e} >= {floor:.1e}",
        eigs[0]
    ));
    assert!(report("12", ok, &details.join("; "), t0.elapsed()));
}
