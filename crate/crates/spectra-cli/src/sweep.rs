//! Constraint sweeps: one 2D ladder solve per grid point plus the shared
//! isosceles reference, evaluated by a worker pool in input order.

use anyhow::{anyhow, Result};
use rayon::prelude::*;
use spectra_core::bounds::{
    eccentric_region, improved_lower_bound_sq, lower_bound_sq, upper_bound_sq, ConstraintFamily,
    RegionVariant,
};
use spectra_core::dirac2d::lambda1_ladder;
use spectra_core::{ConstraintKind, ConstraintSpec, Mass, RightTriangle};

/// One `(a, b, m)` evaluation of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub a: f64,
    pub b: f64,
    pub m: f64,
    /// Extrapolated `lambda_1^2 - m^2`; absent when the point failed.
    pub lambda1_sq_minus_m2: Option<f64>,
    /// Extrapolation error bar on `lambda1_sq_minus_m2`.
    pub err: Option<f64>,
    pub lower_sq: f64,
    pub upper_sq: f64,
    pub improved_lower_sq: Option<f64>,
    /// Extrapolated `lambda_1(k,k)^2 - m^2` of the reference triangle.
    pub reference_iso: f64,
    pub reference_err: f64,
    /// `lambda_1(a,b) - lambda_1(k,k)`.
    pub conjecture_margin: Option<f64>,
    /// Combined error bar on the margin (both extrapolations).
    pub margin_err: Option<f64>,
    pub region_base: bool,
    pub region_large_mass: bool,
    pub fitted_order: Option<f64>,
    pub mesh_ns: Vec<usize>,
    /// Failure note when the 2D solve did not converge; the sweep continues.
    pub error: Option<String>,
}

fn region_family(kind: ConstraintKind) -> ConstraintFamily {
    match kind {
        ConstraintKind::Area => ConstraintFamily::Area,
        ConstraintKind::Perimeter | ConstraintKind::PerimeterLinear => ConstraintFamily::Perimeter,
    }
}

/// Runs the sweep. The isosceles reference `(k, k)` is solved once; per-point
/// failures are recorded in the output and do not abort the run.
pub fn run_sweep(
    spec: &ConstraintSpec,
    a_grid: &[f64],
    m: Mass,
    mesh_ns: &[usize],
) -> Result<Vec<SweepRecord>> {
    if a_grid.is_empty() {
        return Err(anyhow!("empty sweep grid"));
    }
    // validate the whole grid up front
    let mut triangles = Vec::with_capacity(a_grid.len());
    for &a in a_grid {
        triangles.push((a, spec.triangle(a)?));
    }

    let reference_tri = RightTriangle::new(spec.k, spec.k)?;
    let reference = lambda1_ladder(&reference_tri, m, mesh_ns)
        .map_err(|e| anyhow!("isosceles reference solve failed: {e}"))?;
    let ref_nu = reference.extrapolation.value;
    let ref_err = reference.extrapolation.error_bound;
    let ref_lambda = reference.lambda1;

    let records: Vec<SweepRecord> = triangles
        .par_iter()
        .map(|&(a, tri)| {
            let b = tri.b();
            let base = eccentric_region(a, spec.k, region_family(spec.kind), RegionVariant::Base);
            let large =
                eccentric_region(a, spec.k, region_family(spec.kind), RegionVariant::LargeMass);
            let mut rec = SweepRecord {
                a,
                b,
                m: m.value(),
                lambda1_sq_minus_m2: None,
                err: None,
                lower_sq: lower_bound_sq(&tri),
                upper_sq: upper_bound_sq(&tri),
                improved_lower_sq: improved_lower_bound_sq(&tri, m),
                reference_iso: ref_nu,
                reference_err: ref_err,
                conjecture_margin: None,
                margin_err: None,
                region_base: base.holds,
                region_large_mass: large.holds,
                fitted_order: None,
                mesh_ns: mesh_ns.to_vec(),
                error: None,
            };
            match lambda1_ladder(&tri, m, mesh_ns) {
                Ok(ladder) => {
                    rec.lambda1_sq_minus_m2 = Some(ladder.extrapolation.value);
                    rec.err = Some(ladder.extrapolation.error_bound);
                    rec.fitted_order = ladder.extrapolation.order;
                    rec.conjecture_margin = Some(ladder.lambda1 - ref_lambda);
                    // first-order propagation of the nu bars onto lambda
                    let dl = ladder.extrapolation.error_bound / (2.0 * ladder.lambda1);
                    let dr = ref_err / (2.0 * ref_lambda);
                    rec.margin_err = Some(dl + dr);
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            rec
        })
        .collect();
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_comparison_has_zero_margin() {
        let spec = ConstraintSpec::new(ConstraintKind::Area, 1.0).unwrap();
        let recs = run_sweep(&spec, &[1.0], Mass::ZERO, &[8, 16, 32]).unwrap();
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert!(r.error.is_none());
        assert_eq!(r.conjecture_margin.unwrap(), 0.0);
        assert!(!r.region_base);
        let nu = r.lambda1_sq_minus_m2.unwrap();
        assert!(nu > r.lower_sq && nu < r.upper_sq);
    }

    #[test]
    fn eccentric_point_is_classified_and_bounded() {
        let spec = ConstraintSpec::new(ConstraintKind::Area, 1.0).unwrap();
        let recs = run_sweep(&spec, &[9.0], Mass::ZERO, &[8, 16, 32]).unwrap();
        let r = &recs[0];
        assert!(r.region_base);
        // the scale-free sufficient condition at a = 9k
        assert!(r.lower_sq >= 5.0 * std::f64::consts::PI.powi(2));
    }

    #[test]
    fn grid_outside_admissible_interval_fails_upfront() {
        let spec = ConstraintSpec::new(ConstraintKind::Perimeter, 1.0).unwrap();
        assert!(run_sweep(&spec, &[2.0], Mass::ZERO, &[8, 16, 32]).is_err());
    }
}
