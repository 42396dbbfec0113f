//! Right-triangle geometry, the mass parameter, boundary phase constants,
//! and the constraint parametrizations used by sweeps.
//!
//! The domain is the right triangle with vertices `O = (0,0)`, `A = (a,0)`
//! and `B = (0,b)`. Everything downstream (1D fibers, 2D assembly, bounds)
//! is parametrized by the two legs and the non-negative mass.

use num_complex::Complex64;
use thiserror::Error;

/// Perimeter of the isosceles right triangle with legs `k`, divided by `k`.
pub const ISO_PERIMETER_FACTOR: f64 = 2.0 + std::f64::consts::SQRT_2;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("triangle legs must be positive finite numbers, got a={a}, b={b}")]
    InvalidLegs { a: f64, b: f64 },
    #[error("mass must be a non-negative finite number, got {0}")]
    InvalidMass(f64),
    #[error("reference scale k must be a positive finite number, got {0}")]
    InvalidScale(f64),
    #[error("a={a} lies outside the admissible interval ({lo}, {hi}) of the {kind} constraint")]
    OutsideAdmissible {
        a: f64,
        lo: f64,
        hi: f64,
        kind: ConstraintKind,
    },
}

/// The right triangle `O = (0,0)`, `A = (a,0)`, `B = (0,b)`.
///
/// Legs are validated on construction; the fields are immutable afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RightTriangle {
    a: f64,
    b: f64,
}

impl RightTriangle {
    pub fn new(a: f64, b: f64) -> Result<Self, GeometryError> {
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
            return Err(GeometryError::InvalidLegs { a, b });
        }
        Ok(Self { a, b })
    }

    /// Leg along the x-axis.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Leg along the y-axis.
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn hypotenuse(&self) -> f64 {
        self.a.hypot(self.b)
    }

    pub fn area(&self) -> f64 {
        0.5 * self.a * self.b
    }

    pub fn perimeter(&self) -> f64 {
        self.a + self.b + self.hypotenuse()
    }

    /// Triangle with both legs swapped.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
        }
    }

    /// Triangle scaled by `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Self, GeometryError> {
        Self::new(self.a * t, self.b * t)
    }
}

/// Non-negative mass of the relativistic particle (inverse-length units).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Mass(f64);

impl Mass {
    pub const ZERO: Mass = Mass(0.0);

    pub fn new(m: f64) -> Result<Self, GeometryError> {
        if !(m.is_finite() && m >= 0.0) {
            return Err(GeometryError::InvalidMass(m));
        }
        Ok(Self(m))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Derived boundary constants of the triangle.
///
/// `z0` is the negative root of `z^2 + 2(a/b) z - 1 = 0` and drives the
/// tan-type secular equation of vertical fibers; `alpha0` is the positive
/// root of the mirrored quadratic and drives the cot-type secular equation
/// of horizontal fibers; `ab_phase` is the spinor trace phase on the
/// hypotenuse.
///
/// The reciprocal identity pairs the two constants across the leg swap:
/// `alpha0(b, a) * |z0(a, b)| = 1`.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryPhases {
    /// `-(a + sqrt(a^2+b^2))/b`, always `< -1`.
    pub z0: f64,
    /// `a / (b + sqrt(a^2+b^2))`, always in `(0, 1)`.
    pub alpha0: f64,
    /// `(-a + i b)/sqrt(a^2+b^2)`, unit modulus.
    pub ab_phase: Complex64,
}

/// Boundary constants of `tri`.
pub fn boundary_phases(tri: &RightTriangle) -> BoundaryPhases {
    let (a, b) = (tri.a(), tri.b());
    let h = tri.hypotenuse();
    BoundaryPhases {
        z0: -(a + h) / b,
        // equal to (sqrt(a^2+b^2) - b)/a without the cancellation
        alpha0: a / (b + h),
        ab_phase: Complex64::new(-a / h, b / h),
    }
}

/// Which quantity a sweep holds fixed while varying the leg `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Fixed area: `a b = k^2`.
    Area,
    /// Fixed true perimeter: `a + b + sqrt(a^2+b^2) = (2+sqrt(2)) k`.
    Perimeter,
    /// Simplified perimeter parametrization `b = (2+sqrt(2)) k - a` that
    /// treats the leg sum alone as the constraint (the hypotenuse term is
    /// dropped). Kept alongside [`ConstraintKind::Perimeter`] so both
    /// arithmetic conventions can be reproduced and compared.
    PerimeterLinear,
}

impl std::fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstraintKind::Area => write!(f, "area"),
            ConstraintKind::Perimeter => write!(f, "perimeter"),
            ConstraintKind::PerimeterLinear => write!(f, "perimeter-paper"),
        }
    }
}

/// A constraint family together with its reference scale `k`.
///
/// `k` is the leg of the isosceles comparison triangle: `(k, k)` satisfies
/// every constraint kind exactly.
#[derive(Debug, Clone, Copy)]
pub struct ConstraintSpec {
    pub kind: ConstraintKind,
    pub k: f64,
}

impl ConstraintSpec {
    pub fn new(kind: ConstraintKind, k: f64) -> Result<Self, GeometryError> {
        if !(k.is_finite() && k > 0.0) {
            return Err(GeometryError::InvalidScale(k));
        }
        Ok(Self { kind, k })
    }

    /// Open interval of admissible `a` values.
    pub fn admissible(&self) -> (f64, f64) {
        let p = ISO_PERIMETER_FACTOR * self.k;
        match self.kind {
            ConstraintKind::Area => (0.0, f64::INFINITY),
            ConstraintKind::Perimeter => (0.0, 0.5 * p),
            ConstraintKind::PerimeterLinear => (0.0, p),
        }
    }

    /// The leg `b` paired with `a` by the constraint.
    pub fn partner(&self, a: f64) -> Result<f64, GeometryError> {
        let (lo, hi) = self.admissible();
        if !(a.is_finite() && a > lo && a < hi) {
            return Err(GeometryError::OutsideAdmissible {
                a,
                lo,
                hi,
                kind: self.kind,
            });
        }
        Ok(match self.kind {
            ConstraintKind::Area => self.k * self.k / a,
            ConstraintKind::Perimeter => {
                // closed form of a + b + sqrt(a^2+b^2) = p solved for b
                let p = ISO_PERIMETER_FACTOR * self.k;
                p * (p - 2.0 * a) / (2.0 * (p - a))
            }
            ConstraintKind::PerimeterLinear => ISO_PERIMETER_FACTOR * self.k - a,
        })
    }

    /// The constrained triangle `(a, partner(a))`.
    pub fn triangle(&self, a: f64) -> Result<RightTriangle, GeometryError> {
        RightTriangle::new(a, self.partner(a)?)
    }
}
