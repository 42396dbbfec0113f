//! High-order quadrature for Rayleigh quotients of analytic trial fields.
//!
//! Area integrals use a Duffy-collapsed tensor Gauss-Legendre rule on the
//! mapped unit triangle; boundary integrals use the same 1D rule per side.

use super::Dirac2dError;
use crate::geometry::{boundary_phases, Mass, RightTriangle};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[0, 1]` (Newton on the Legendre
/// recurrence).
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // initial guess on [-1, 1]
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, 0.0f64);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k as f64 + 1.0) * x * p1 - k as f64 * p2) / (k as f64 + 1.0);
            }
            let dp = n as f64 * (x * p0 - p1) / (x * x - 1.0);
            let dx = p0 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, 0.0f64);
        for k in 0..n {
            let p2 = p1;
            p1 = p0;
            p0 = ((2.0 * k as f64 + 1.0) * x * p1 - k as f64 * p2) / (k as f64 + 1.0);
        }
        let dp = n as f64 * (x * p0 - p1) / (x * x - 1.0);
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// An analytic spinor trial field with exact gradients.
pub trait SpinorField {
    fn value(&self, x: f64, y: f64) -> (Complex64, Complex64);
    /// `((d1 psi1, d2 psi1), (d1 psi2, d2 psi2))`.
    #[allow(clippy::type_complexity)]
    fn gradient(&self, x: f64, y: f64) -> ((Complex64, Complex64), (Complex64, Complex64));
}

/// The built-in trial field: the first Dirichlet eigenfunction of the
/// isosceles right triangle, scaled to `(a, b)` and placed on both spinor
/// components. It vanishes on the whole boundary, so it satisfies every
/// trace constraint.
pub struct PsiO {
    a: f64,
    b: f64,
}

/// Trial field scaled to `tri`.
pub fn psi_o(tri: &RightTriangle) -> PsiO {
    PsiO {
        a: tri.a(),
        b: tri.b(),
    }
}

impl PsiO {
    fn g(&self, s: f64, t: f64) -> f64 {
        (2.0 * PI * s).sin() * (PI * t).sin() + (2.0 * PI * t).sin() * (PI * s).sin()
    }

    fn g_s(&self, s: f64, t: f64) -> f64 {
        2.0 * PI * (2.0 * PI * s).cos() * (PI * t).sin() + PI * (2.0 * PI * t).sin() * (PI * s).cos()
    }
}

impl SpinorField for PsiO {
    fn value(&self, x: f64, y: f64) -> (Complex64, Complex64) {
        let v = Complex64::new(self.g(x / self.a, y / self.b), 0.0);
        (v, v)
    }

    fn gradient(&self, x: f64, y: f64) -> ((Complex64, Complex64), (Complex64, Complex64)) {
        let (s, t) = (x / self.a, y / self.b);
        let dx = Complex64::new(self.g_s(s, t) / self.a, 0.0);
        // g is symmetric, so d/dt g(s, t) = g_s(t, s)
        let dy = Complex64::new(self.g_s(t, s) / self.b, 0.0);
        ((dx, dy), (dx, dy))
    }
}

const GL_POINTS: usize = 48;

/// Rayleigh quotient `Q[field] / ||field||^2` on the triangle, by
/// high-order quadrature of the analytic field.
///
/// The field must satisfy the trace constraints; fields violating them by
/// more than `1e-10` of the field scale are rejected. For [`psi_o`] the
/// result is `(5 pi^2 / 2)(1/a^2 + 1/b^2) + m^2` up to quadrature error.
pub fn rayleigh_quotient<F: SpinorField + ?Sized>(
    tri: &RightTriangle,
    m: Mass,
    field: &F,
) -> Result<f64, Dirac2dError> {
    let (a, b) = (tri.a(), tri.b());
    let m = m.value();
    let (nodes, weights) = gauss_legendre(GL_POINTS);

    // Duffy map of the unit triangle: (u, v) -> (u (1 - v), u v), det = u
    let mut grad_sq = 0.0;
    let mut mass_sq = 0.0;
    let mut field_scale = 0.0f64;
    for (iu, &u) in nodes.iter().enumerate() {
        for (iv, &v) in nodes.iter().enumerate() {
            let s = u * (1.0 - v);
            let t = u * v;
            let w = weights[iu] * weights[iv] * u * a * b;
            let (p1, p2) = field.value(a * s, b * t);
            let ((g1x, g1y), (g2x, g2y)) = field.gradient(a * s, b * t);
            mass_sq += w * (p1.norm_sqr() + p2.norm_sqr());
            grad_sq += w * (g1x.norm_sqr() + g1y.norm_sqr() + g2x.norm_sqr() + g2y.norm_sqr());
            field_scale = field_scale.max(p1.norm() + p2.norm());
        }
    }

    // boundary traces and constraint verification
    let phases = boundary_phases(tri);
    let hyp = tri.hypotenuse();
    let sides: [([f64; 2], [f64; 2], f64, Complex64); 3] = [
        ([0.0, 0.0], [a, 0.0], a, Complex64::new(1.0, 0.0)),
        ([0.0, 0.0], [0.0, b], b, Complex64::new(0.0, -1.0)),
        ([a, 0.0], [0.0, b], hyp, phases.ab_phase),
    ];
    let mut trace_sq = 0.0;
    let mut worst_defect = 0.0f64;
    for (from, to, len, phase) in sides {
        for (k, &s) in nodes.iter().enumerate() {
            let x = from[0] + s * (to[0] - from[0]);
            let y = from[1] + s * (to[1] - from[1]);
            let (p1, p2) = field.value(x, y);
            trace_sq += weights[k] * len * (p1.norm_sqr() + p2.norm_sqr());
            worst_defect = worst_defect.max((p2 - phase * p1).norm());
            field_scale = field_scale.max(p1.norm() + p2.norm());
        }
    }
    if worst_defect > 1e-10 * field_scale.max(f64::MIN_POSITIVE) {
        return Err(Dirac2dError::ConstraintViolation {
            defect: worst_defect,
            scale: field_scale,
        });
    }
    if !(mass_sq > 1e-280) {
        return Err(Dirac2dError::ZeroTrialField);
    }
    Ok((grad_sq + m * m * mass_sq + m * trace_sq) / mass_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        for p in 0..16 {
            let approx_val: f64 = x
                .iter()
                .zip(&w)
                .map(|(&xi, &wi)| wi * xi.powi(p))
                .sum();
            assert_relative_eq!(approx_val, 1.0 / (p as f64 + 1.0), max_relative = 1e-13);
        }
    }

    #[test]
    fn psi_o_vanishes_on_boundary() {
        let tri = RightTriangle::new(2.0, 1.0).unwrap();
        let f = psi_o(&tri);
        for i in 0..=16 {
            let s = i as f64 / 16.0;
            assert!(f.value(2.0 * s, 0.0).0.norm() < 1e-14);
            assert!(f.value(0.0, s).0.norm() < 1e-14);
            assert!(f.value(2.0 * (1.0 - s), s).0.norm() < 1e-13);
        }
    }

    #[test]
    fn psi_o_quotient_matches_closed_form() {
        for (a, b) in [(1.0, 1.0), (2.0, 1.0)] {
            for m in [0.0, 1.0] {
                let tri = RightTriangle::new(a, b).unwrap();
                let q = rayleigh_quotient(&tri, Mass::new(m).unwrap(), &psi_o(&tri)).unwrap();
                let expected = 2.5 * PI * PI * (1.0 / (a * a) + 1.0 / (b * b)) + m * m;
                assert_relative_eq!(q, expected, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn constraint_violation_is_rejected() {
        struct Bad;
        impl SpinorField for Bad {
            fn value(&self, _x: f64, _y: f64) -> (Complex64, Complex64) {
                (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            }
            fn gradient(
                &self,
                _x: f64,
                _y: f64,
            ) -> ((Complex64, Complex64), (Complex64, Complex64)) {
                let z = Complex64::new(0.0, 0.0);
                ((z, z), (z, z))
            }
        }
        let tri = RightTriangle::new(1.0, 1.0).unwrap();
        assert!(matches!(
            rayleigh_quotient(&tri, Mass::ZERO, &Bad),
            Err(Dirac2dError::ConstraintViolation { .. })
        ));
    }
}
