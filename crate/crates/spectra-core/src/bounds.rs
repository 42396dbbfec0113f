//! Closed-form bounds on the squared lowest positive eigenvalue and the
//! eccentricity classifiers built from them.
//!
//! All quantities here are energies `lambda_1(a,b)^2 - m^2`; they are exact
//! expressions, not numerical solves.

use crate::geometry::{boundary_phases, Mass, RightTriangle};
use std::f64::consts::PI;

/// Lower bound on `lambda_1(a,b)^2 - m^2`, valid for every mass:
///
/// `arctan^2((a + h)/b)/b^2 + arctan^2((b + h)/a)/a^2`, `h = sqrt(a^2+b^2)`.
///
/// Symmetric under the leg swap.
pub fn lower_bound_sq(tri: &RightTriangle) -> f64 {
    let (a, b) = (tri.a(), tri.b());
    let h = tri.hypotenuse();
    let t_vert = ((a + h) / b).atan();
    let t_horiz = ((b + h) / a).atan();
    t_vert * t_vert / (b * b) + t_horiz * t_horiz / (a * a)
}

/// Upper bound on `lambda_1(a,b)^2 - m^2`: `(5 pi^2 / 2)(1/a^2 + 1/b^2)`.
///
/// Sharp in the large-mass limit for `a = b`, where the right-hand side is
/// the first Dirichlet eigenvalue `5 pi^2 / a^2` of the triangle.
pub fn upper_bound_sq(tri: &RightTriangle) -> f64 {
    let (a, b) = (tri.a(), tri.b());
    2.5 * PI * PI * (1.0 / (a * a) + 1.0 / (b * b))
}

/// Crude floor `pi^2/(16 a^2) + pi^2/(16 b^2)` that [`lower_bound_sq`]
/// strictly exceeds for every triangle.
pub fn coarse_floor_sq(tri: &RightTriangle) -> f64 {
    let (a, b) = (tri.a(), tri.b());
    PI * PI / 16.0 * (1.0 / (a * a) + 1.0 / (b * b))
}

/// Mass threshold `m_0 = (pi/(2a)) sqrt(alpha_0^2 / (1 - alpha_0^2))` above
/// which [`improved_lower_bound_sq`] applies. The fiber length is the
/// horizontal leg `a`.
pub fn mass_threshold(tri: &RightTriangle) -> f64 {
    let alpha0 = boundary_phases(tri).alpha0;
    PI / (2.0 * tri.a()) * alpha0 / (1.0 - alpha0 * alpha0).sqrt()
}

/// Improved lower bound `pi^2/(4 a^2) + pi^2/(16 b^2)`, claimed only for
/// masses at or above [`mass_threshold`]; `None` below the threshold.
pub fn improved_lower_bound_sq(tri: &RightTriangle, m: Mass) -> Option<f64> {
    if m.value() >= mass_threshold(tri) {
        let (a, b) = (tri.a(), tri.b());
        Some(PI * PI / (4.0 * a * a) + PI * PI / (16.0 * b * b))
    } else {
        None
    }
}

/// Constraint family for the eccentricity classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintFamily {
    Area,
    Perimeter,
}

/// Which set of thresholds to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionVariant {
    /// Mass-independent thresholds.
    Base,
    /// Wider thresholds valid once the mass exceeds the attached threshold.
    LargeMass,
}

/// Outcome of the eccentricity classifier.
#[derive(Debug, Clone, Copy)]
pub struct RegionCheck {
    /// Whether `(a, k)` lies in the region where the isosceles comparison
    /// `lambda_1(a,b) >= lambda_1(k,k)` is guaranteed.
    pub holds: bool,
    /// For [`RegionVariant::LargeMass`], the side condition on the mass:
    /// the guarantee needs `m >= mass_threshold`. `None` for `Base`.
    pub mass_threshold: Option<f64>,
}

/// Classifies whether the side `a` is eccentric enough (relative to the
/// scale `k`) for the isosceles-minimizer comparison to be guaranteed.
///
/// Thresholds: Area/Base `a >= 9k` or `a <= k/9`; Perimeter/Base
/// `a >= 3.5k` or `a <= k/9`; the LargeMass variant widens the small side
/// to `a <= k/5` and carries the mass side condition as metadata.
pub fn eccentric_region(
    a: f64,
    k: f64,
    family: ConstraintFamily,
    variant: RegionVariant,
) -> RegionCheck {
    let big = match family {
        ConstraintFamily::Area => 9.0 * k,
        ConstraintFamily::Perimeter => 3.5 * k,
    };
    let small = match variant {
        RegionVariant::Base => k / 9.0,
        RegionVariant::LargeMass => k / 5.0,
    };
    let holds = a >= big || a <= small;
    let mass_threshold = match variant {
        RegionVariant::Base => None,
        RegionVariant::LargeMass => {
            let b = match family {
                ConstraintFamily::Area => k * k / a,
                ConstraintFamily::Perimeter => (crate::geometry::ISO_PERIMETER_FACTOR * k - a).max(f64::MIN_POSITIVE),
            };
            RightTriangle::new(a, b).ok().map(|t| mass_threshold(&t))
        }
    };
    RegionCheck {
        holds,
        mass_threshold,
    }
}

/// Scale-free sufficient condition: `lower_bound_sq(a, b) >= 5 pi^2 / k^2`.
///
/// When it holds, the isosceles comparison follows for both constraint
/// families without any scaling argument.
pub fn sufficient_condition(a: f64, b: f64, k: f64) -> bool {
    match RightTriangle::new(a, b) {
        Ok(t) => lower_bound_sq(&t) >= 5.0 * PI * PI / (k * k),
        Err(_) => false,
    }
}
