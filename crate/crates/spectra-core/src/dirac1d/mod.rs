//! Exact solvers for the 1D Dirac fiber operators on an interval `(0, L)`.
//!
//! Restricting the triangle's quadratic form to vertical or horizontal
//! segments produces 1D Dirac operators whose spectra solve transcendental
//! secular equations:
//!
//! * vertical fibers (left endpoint on the horizontal leg, trace phase `1`):
//!   `((x + m)/sqrt(E)) tan(sqrt(E) L) = z0` with `E = x^2 - m^2`;
//! * horizontal fibers (left endpoint on the vertical leg, trace phase `-i`):
//!   `sqrt(F) cot(sqrt(F) L) + m = alpha0 x` with `F = x^2 - m^2`.
//!
//! Both right endpoints carry the hypotenuse phase. The tan/cot poles
//! partition the energy axis into branches holding one root each; roots are
//! isolated by sign-change scanning and refined by bisection plus one
//! guarded Newton step. The [`shooting`] submodule provides an independent
//! adaptive-RK oracle for the same spectra.

use crate::geometry::{boundary_phases, BoundaryPhases, GeometryError, Mass, RightTriangle};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

pub mod shooting;

pub use shooting::{shooting_defect, shooting_eigenvalues, unitary_equivalence_check, UnitaryEquivalence};

#[derive(Debug, Error)]
pub enum Dirac1dError {
    #[error("trial value {value} lies in the spectral gap [-{m}, {m}]")]
    InsideMassGap { value: f64, m: f64 },
    #[error("operation requires the {expected:?} family, got {got:?}")]
    WrongFamily {
        expected: FiberFamily,
        got: FiberFamily,
    },
    #[error("no root bracket in branch {branch} of the {side} side over [{lo}, {hi}]")]
    BracketFailed {
        branch: usize,
        side: &'static str,
        lo: f64,
        hi: f64,
    },
    #[error("{branch_count} sign changes in branch {branch}; expected a monotone residual with one root")]
    NonMonotoneBranch { branch: usize, branch_count: usize },
    #[error("{value} is not an eigenvalue: secular residual {residual:.3e}")]
    NotAnEigenvalue { value: f64, residual: f64 },
    #[error("empty spectrum")]
    EmptySpectrum,
    #[error("adaptive integrator failed: {0}")]
    Integrator(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Fiber direction inside the triangle.
///
/// Vertical fibers start on the horizontal leg (trace phase `1` at `x = 0`);
/// horizontal fibers start on the vertical leg (trace phase `-i`). Both end
/// on the hypotenuse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberFamily {
    Vertical,
    Horizontal,
}

/// A 1D fiber eigenvalue problem: family, interval length, mass, and the
/// boundary phase constants of the parent triangle.
#[derive(Debug, Clone, Copy)]
pub struct FiberProblem {
    pub family: FiberFamily,
    pub l: f64,
    pub m: f64,
    pub phases: BoundaryPhases,
}

impl FiberProblem {
    pub fn new(
        family: FiberFamily,
        tri: &RightTriangle,
        l: f64,
        m: Mass,
    ) -> Result<Self, Dirac1dError> {
        if !(l.is_finite() && l > 0.0) {
            return Err(GeometryError::InvalidScale(l).into());
        }
        Ok(Self {
            family,
            l,
            m: m.value(),
            phases: boundary_phases(tri),
        })
    }

    /// Spinor trace phase at the left endpoint `x = 0`.
    pub fn left_phase(&self) -> Complex64 {
        match self.family {
            FiberFamily::Vertical => Complex64::new(1.0, 0.0),
            FiberFamily::Horizontal => Complex64::new(0.0, -1.0),
        }
    }

    /// Spinor trace phase at the right endpoint `x = L` (hypotenuse).
    pub fn right_phase(&self) -> Complex64 {
        self.phases.ab_phase
    }

    fn check_gap(&self, x: f64) -> Result<f64, Dirac1dError> {
        let e = x * x - self.m * self.m;
        if !(x.is_finite() && e > 0.0) {
            return Err(Dirac1dError::InsideMassGap {
                value: x,
                m: self.m,
            });
        }
        Ok(e)
    }
}

/// Value of a secular residual, or a marker that the trial point sits on a
/// tan/cot pole (used by the bracketing engine to stay inside branches).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SecularValue {
    Value(f64),
    Pole,
}

impl SecularValue {
    pub fn value(self) -> Option<f64> {
        match self {
            SecularValue::Value(v) => Some(v),
            SecularValue::Pole => None,
        }
    }
}

fn near_tan_pole(t: f64) -> bool {
    let k = ((t / PI) - 0.5).round();
    (t - (k + 0.5) * PI).abs() <= 1e-12 * t.max(1.0)
}

fn near_cot_pole(t: f64) -> bool {
    let k = (t / PI).round();
    k >= 1.0 && (t - k * PI).abs() <= 1e-12 * t.max(1.0)
}

/// Secular residual of `prob` at the trial eigenvalue `x`.
///
/// Vertical: `((x+m)/sqrt(E)) tan(sqrt(E) L) - z0`; horizontal:
/// `sqrt(F) cot(sqrt(F) L) + m - alpha0 x`. Zero exactly at eigenvalues.
pub fn secular_residual(prob: &FiberProblem, x: f64) -> Result<SecularValue, Dirac1dError> {
    let e = prob.check_gap(x)?;
    let s = e.sqrt();
    let t = s * prob.l;
    Ok(match prob.family {
        FiberFamily::Vertical => {
            if near_tan_pole(t) {
                SecularValue::Pole
            } else {
                SecularValue::Value((x + prob.m) / s * t.tan() - prob.phases.z0)
            }
        }
        FiberFamily::Horizontal => {
            if near_cot_pole(t) {
                SecularValue::Pole
            } else {
                SecularValue::Value(s / t.tan() + prob.m - prob.phases.alpha0 * x)
            }
        }
    })
}

/// One root of a secular equation.
#[derive(Debug, Clone, Copy)]
pub struct Eigenvalue1d {
    /// The eigenvalue itself (signed).
    pub value: f64,
    /// `value^2 - m^2`, always positive.
    pub energy: f64,
    /// Index of the tan/cot period containing `sqrt(energy) * L`.
    pub branch: usize,
    /// Whether the root lies in the range covered by the closed-form
    /// monotonicity analysis (all branches for vertical fibers, the first
    /// cot period for horizontal ones).
    pub validated: bool,
}

/// Ordered eigenvalue list of one fiber problem.
#[derive(Debug, Clone)]
pub struct Spectrum1D {
    pub family: FiberFamily,
    pub l: f64,
    pub m: f64,
    pub eigenvalues: Vec<Eigenvalue1d>,
}

/// Result of [`closest_to_zero`].
#[derive(Debug, Clone, Copy)]
pub struct ClosestToZero {
    pub eigenvalue: Eigenvalue1d,
    /// Set when an exact `+/-` pair ties; the negative member is returned.
    pub tie: bool,
}

struct Branch {
    index: usize,
    t_lo: f64,
    t_hi: f64,
    /// whether the full branch is guaranteed to hold a root
    must_contain: bool,
}

fn branches_for(
    family: FiberFamily,
    side: f64,
    t_max: f64,
) -> impl Iterator<Item = Branch> {
    let mut n = 0usize;
    std::iter::from_fn(move || {
        let (t_lo, t_hi) = match family {
            FiberFamily::Vertical => (((n as f64) - 0.5) * PI, ((n as f64) + 0.5) * PI),
            FiberFamily::Horizontal => ((n as f64) * PI, ((n as f64) + 1.0) * PI),
        };
        if t_lo.max(0.0) >= t_max {
            return None;
        }
        let must_contain = match family {
            FiberFamily::Vertical => side < 0.0 || n >= 1,
            FiberFamily::Horizontal => true,
        };
        let b = Branch {
            index: n,
            t_lo: t_lo.max(0.0),
            t_hi,
            must_contain,
        };
        n += 1;
        Some(b)
    })
}

const SCAN_CELLS: usize = 96;

/// All secular roots of `prob` inside `window`, at most `max_count` of them
/// (the closest-to-zero roots are kept when the window holds more).
///
/// The window is intersected with the complement of the spectral gap
/// `[-m, m]`; an empty intersection yields an empty spectrum.
pub fn eigenvalues_in_window(
    prob: &FiberProblem,
    window: (f64, f64),
    max_count: usize,
) -> Result<Spectrum1D, Dirac1dError> {
    let (w_lo, w_hi) = window;
    let mut roots: Vec<Eigenvalue1d> = Vec::new();
    if w_lo < w_hi {
        for side in [1.0f64, -1.0] {
            // |x| range covered by the window on this side
            let (abs_lo, abs_hi) = if side > 0.0 {
                (w_lo.max(prob.m), w_hi)
            } else {
                ((-w_hi).max(prob.m), -w_lo)
            };
            if abs_hi <= abs_lo || abs_hi <= prob.m {
                continue;
            }
            let t_of = |x_abs: f64| ((x_abs * x_abs - prob.m * prob.m).max(0.0)).sqrt() * prob.l;
            let t_lo = t_of(abs_lo);
            let t_hi = t_of(abs_hi);
            for branch in branches_for(prob.family, side, t_hi) {
                let clipped_lo = branch.t_lo.max(t_lo);
                let clipped_hi = branch.t_hi.min(t_hi);
                if clipped_lo >= clipped_hi {
                    continue;
                }
                let fully_covered = branch.t_lo >= t_lo && branch.t_hi <= t_hi;
                if let Some(root) = scan_branch(prob, side, &branch, clipped_lo, clipped_hi, fully_covered)? {
                    let energy = root * root - prob.m * prob.m;
                    let t = energy.sqrt() * prob.l;
                    let validated = match prob.family {
                        FiberFamily::Vertical => true,
                        FiberFamily::Horizontal => t < PI,
                    };
                    if root > w_lo && root < w_hi {
                        roots.push(Eigenvalue1d {
                            value: root,
                            energy,
                            branch: branch.index,
                            validated,
                        });
                    }
                }
            }
        }
    }
    roots.sort_by(|p, q| p.value.abs().partial_cmp(&q.value.abs()).unwrap());
    roots.truncate(max_count.max(1));
    roots.sort_by(|p, q| p.value.partial_cmp(&q.value).unwrap());
    Ok(Spectrum1D {
        family: prob.family,
        l: prob.l,
        m: prob.m,
        eigenvalues: roots,
    })
}

/// Scans one branch for the sign change and refines it. Returns the root if
/// the branch (possibly clipped by the window) holds one.
fn scan_branch(
    prob: &FiberProblem,
    side: f64,
    branch: &Branch,
    clipped_lo: f64,
    clipped_hi: f64,
    fully_covered: bool,
) -> Result<Option<f64>, Dirac1dError> {
    let x_of = |t: f64| side * (prob.m * prob.m + (t / prob.l) * (t / prob.l)).sqrt();
    let f = |t: f64| -> Option<f64> {
        secular_residual(prob, x_of(t)).ok().and_then(SecularValue::value)
    };
    // keep a safety margin off poles and off the gap edge t = 0
    let width = clipped_hi - clipped_lo;
    let mut eps = (1e-7 * PI).min(1e-3 * width);
    let mut lo = if clipped_lo <= branch.t_lo + eps || clipped_lo == 0.0 {
        clipped_lo + eps
    } else {
        clipped_lo
    };
    let mut hi = if clipped_hi >= branch.t_hi - eps {
        clipped_hi - eps
    } else {
        clipped_hi
    };
    for _attempt in 0..5 {
        let mut prev: Option<(f64, f64)> = None;
        let mut brackets: Vec<(f64, f64)> = Vec::new();
        for i in 0..=SCAN_CELLS {
            let t = lo + (hi - lo) * (i as f64) / (SCAN_CELLS as f64);
            if let Some(v) = f(t) {
                if let Some((tp, vp)) = prev {
                    if v == 0.0 || vp * v < 0.0 {
                        brackets.push((tp, t));
                    }
                }
                prev = Some((t, v));
            }
        }
        match brackets.len() {
            0 => {
                if !(fully_covered && branch.must_contain) {
                    return Ok(None);
                }
                // the root may hide between the pole and the safety margin
                eps *= 1e-3;
                lo = branch.t_lo.max(0.0) + eps;
                hi = branch.t_hi - eps;
                if eps < 1e-15 {
                    return Err(Dirac1dError::BracketFailed {
                        branch: branch.index,
                        side: if side > 0.0 { "positive" } else { "negative" },
                        lo: x_of(clipped_lo),
                        hi: x_of(clipped_hi),
                    });
                }
            }
            1 => {
                let (tl, th) = brackets[0];
                return Ok(Some(refine_root(prob, x_of(tl), x_of(th))));
            }
            n => {
                return Err(Dirac1dError::NonMonotoneBranch {
                    branch: branch.index,
                    branch_count: n,
                })
            }
        }
    }
    Err(Dirac1dError::BracketFailed {
        branch: branch.index,
        side: if side > 0.0 { "positive" } else { "negative" },
        lo: x_of(clipped_lo),
        hi: x_of(clipped_hi),
    })
}

/// Bisection to relative bracket width `1e-13`, then one guarded Newton
/// step (kept only when it stays inside the bracket and shrinks the
/// residual).
fn refine_root(prob: &FiberProblem, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = if a < b { (a, b) } else { (b, a) };
    let eval = |x: f64| -> f64 {
        secular_residual(prob, x)
            .ok()
            .and_then(SecularValue::value)
            .unwrap_or(f64::INFINITY)
    };
    let mut f_lo = eval(lo);
    for _ in 0..200 {
        if (hi - lo) <= 1e-13 * lo.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = eval(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = eval(x);
    let h = 1e-7 * x.abs().max(1.0);
    let (fp, fm) = (eval(x + h), eval(x - h));
    if fp.is_finite() && fm.is_finite() {
        let d = (fp - fm) / (2.0 * h);
        if d != 0.0 {
            let xn = x - fx / d;
            if xn > lo && xn < hi && eval(xn).abs() <= fx.abs() {
                return xn;
            }
        }
    }
    x
}

/// Eigenvalue of minimal modulus. Exact `+/-` ties resolve to the negative
/// member with `tie = true`.
pub fn closest_to_zero(spectrum: &Spectrum1D) -> Result<ClosestToZero, Dirac1dError> {
    let mut best: Option<Eigenvalue1d> = None;
    for ev in &spectrum.eigenvalues {
        match best {
            None => best = Some(*ev),
            Some(b) => {
                if ev.value.abs() < b.value.abs() {
                    best = Some(*ev);
                }
            }
        }
    }
    let best = best.ok_or(Dirac1dError::EmptySpectrum)?;
    let tie = spectrum.eigenvalues.iter().any(|ev| {
        ev.value != best.value && (ev.value + best.value).abs() <= 1e-12 * best.value.abs()
    });
    if tie && best.value > 0.0 {
        let neg = spectrum
            .eigenvalues
            .iter()
            .find(|ev| (ev.value + best.value).abs() <= 1e-12 * best.value.abs())
            .copied()
            .unwrap_or(best);
        return Ok(ClosestToZero {
            eigenvalue: neg,
            tie,
        });
    }
    Ok(ClosestToZero {
        eigenvalue: best,
        tie,
    })
}

/// Energy `E_1 = x_1^2 - m^2` of the closest-to-zero eigenvalue, with the
/// window chosen automatically to cover the first branches on both sides.
pub fn first_energy(prob: &FiberProblem) -> Result<f64, Dirac1dError> {
    let cap = (prob.m * prob.m + (2.0 * PI / prob.l).powi(2)).sqrt() * 1.000001;
    let spectrum = eigenvalues_in_window(prob, (-cap, cap), 64)?;
    Ok(closest_to_zero(&spectrum)?.eigenvalue.energy)
}

/// Spinor eigenfunction of a vertical fiber at the eigenvalue `lambda`,
/// normalized by `u_1(0) = u_2(0) = 1`:
///
/// `u_1 = cos(sqrt(E) x) + i M sin(sqrt(E) x)`,
/// `u_2 = cos(sqrt(E) x) - i M sin(sqrt(E) x)`, with `M = (lambda+m)/sqrt(E)`.
pub fn eigenfunction(
    prob: &FiberProblem,
    lambda: f64,
    x: f64,
) -> Result<(Complex64, Complex64), Dirac1dError> {
    if prob.family != FiberFamily::Vertical {
        return Err(Dirac1dError::WrongFamily {
            expected: FiberFamily::Vertical,
            got: prob.family,
        });
    }
    let e = prob.check_gap(lambda)?;
    match secular_residual(prob, lambda)? {
        SecularValue::Value(r) => {
            let scale = prob.phases.z0.abs().max(1.0);
            if r.abs() > 1e-6 * scale {
                return Err(Dirac1dError::NotAnEigenvalue {
                    value: lambda,
                    residual: r,
                });
            }
        }
        SecularValue::Pole => {
            return Err(Dirac1dError::NotAnEigenvalue {
                value: lambda,
                residual: f64::INFINITY,
            })
        }
    }
    let s = e.sqrt();
    let ratio = (lambda + prob.m) / s;
    let (c, sn) = ((s * x).cos(), (s * x).sin());
    Ok((
        Complex64::new(c, ratio * sn),
        Complex64::new(c, -ratio * sn),
    ))
}

/// Sharp constant of the fiber Poincare-type inequality:
/// `arctan^2(|z0|)/L^2` for vertical fibers, `arctan^2(1/alpha0)/L^2` for
/// horizontal ones. Both exceed `pi^2/(16 L^2)`.
pub fn poincare_constant(prob: &FiberProblem) -> f64 {
    let t = match prob.family {
        FiberFamily::Vertical => prob.phases.z0.abs().atan(),
        FiberFamily::Horizontal => (1.0 / prob.phases.alpha0).atan(),
    };
    t * t / (prob.l * prob.l)
}

/// Mass threshold `m_0 = (pi/(2L)) sqrt(alpha0^2/(1 - alpha0^2))` at which
/// the first horizontal-fiber energy reaches `pi^2/(4 L^2)`.
pub fn mass_threshold_m0(prob: &FiberProblem) -> Result<f64, Dirac1dError> {
    if prob.family != FiberFamily::Horizontal {
        return Err(Dirac1dError::WrongFamily {
            expected: FiberFamily::Horizontal,
            got: prob.family,
        });
    }
    let a0 = prob.phases.alpha0;
    Ok(PI / (2.0 * prob.l) * a0 / (1.0 - a0 * a0).sqrt())
}
