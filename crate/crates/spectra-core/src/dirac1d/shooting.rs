//! Independent shooting oracle for the 1D fiber spectra.
//!
//! Integrates the first-order spinor system
//! `u1' = i (x u1 + m u2)`, `u2' = -i (x u2 + m u1)` from the left boundary
//! condition with an adaptive Dormand-Prince 5(4) scheme and measures the
//! defect of the right boundary condition. The modulus ratio `|u2/u1| = 1`
//! is conserved for unit left phases, so eigenvalues are located by
//! tracking the boundary phase mismatch along the energy axis; this path
//! shares no code with the secular solvers.

use super::{Dirac1dError, FiberProblem};
use crate::geometry::{boundary_phases, Mass, RightTriangle};
use num_complex::Complex64;
use std::f64::consts::PI;

const RTOL: f64 = 1e-12;
const ATOL: f64 = 1e-14;
const MAX_STEPS: usize = 2_000_000;

type State = [Complex64; 2];

#[inline]
fn rhs(x: f64, m: f64, u: &State) -> State {
    [
        Complex64::i() * (x * u[0] + m * u[1]),
        -Complex64::i() * (x * u[1] + m * u[0]),
    ]
}

/// Dormand-Prince 5(4) solution of the spinor system over `[0, l]`.
fn integrate(l: f64, m: f64, x: f64, left_phase: Complex64) -> Result<State, Dirac1dError> {
    let mut y: State = [Complex64::new(1.0, 0.0), left_phase];
    let mut t = 0.0f64;
    let mut h = (l / 64.0).min(0.1 / (x.abs() + m + 1.0));
    let mut k1 = rhs(x, m, &y);
    let mut steps = 0usize;

    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    // difference between the 5th- and 4th-order weights
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];

    while t < l {
        if steps > MAX_STEPS {
            return Err(Dirac1dError::Integrator(format!(
                "step limit exceeded at t = {t} (x = {x})"
            )));
        }
        steps += 1;
        if t + h > l {
            h = l - t;
        }
        let mut k = [k1, k1, k1, k1, k1, k1, k1];
        for stage in 0..6 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                let a = A[stage][j];
                if a != 0.0 {
                    yi[0] += h * a * kj[0];
                    yi[1] += h * a * kj[1];
                }
            }
            k[stage + 1] = rhs(x, m, &yi);
        }
        // stage 7 input is the 5th-order solution (FSAL)
        let ynew = {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(6) {
                let a = A[5][j];
                if a != 0.0 {
                    yi[0] += h * a * kj[0];
                    yi[1] += h * a * kj[1];
                }
            }
            yi
        };
        let mut err_sq = 0.0f64;
        for comp in 0..2 {
            let mut err = Complex64::new(0.0, 0.0);
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    err += h * E[j] * kj[comp];
                }
            }
            let scale = ATOL + RTOL * y[comp].norm().max(ynew[comp].norm());
            err_sq += (err.norm() / scale).powi(2);
        }
        let err_norm = (err_sq / 2.0).sqrt();
        if err_norm <= 1.0 {
            t += h;
            y = ynew;
            k1 = k[6];
        }
        let factor = if err_norm > 0.0 {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h * factor).min(l);
        if h < 1e-15 * l {
            return Err(Dirac1dError::Integrator(format!(
                "step size underflow at t = {t} (x = {x})"
            )));
        }
    }
    Ok(y)
}

/// Complex defect `u2(L) - phase_L * u1(L)` of the right boundary condition
/// for the solution launched from the left one. Vanishes exactly at
/// eigenvalues.
pub fn shooting_defect(prob: &FiberProblem, trial: f64) -> Result<Complex64, Dirac1dError> {
    prob.check_gap(trial)?;
    let u = integrate(prob.l, prob.m, trial, prob.left_phase())?;
    Ok(u[1] - prob.right_phase() * u[0])
}

/// Eigenvalues of `prob` inside `window` found purely by shooting.
pub fn shooting_eigenvalues(
    prob: &FiberProblem,
    window: (f64, f64),
    max_count: usize,
) -> Result<Vec<f64>, Dirac1dError> {
    shooting_spectrum_with_phases(
        prob.l,
        prob.m,
        prob.left_phase(),
        prob.right_phase(),
        window,
        max_count,
    )
}

/// Shooting enumeration for arbitrary unit boundary phases.
///
/// The boundary ratio `r(L) = u2(L)/u1(L)` stays on the unit circle, so the
/// mismatch `sigma = Im(r conj(target))` is a real function whose admissible
/// zeros (those with `Re(r conj(target)) > 0`) are exactly the eigenvalues.
pub fn shooting_spectrum_with_phases(
    l: f64,
    m: f64,
    left_phase: Complex64,
    right_phase: Complex64,
    window: (f64, f64),
    max_count: usize,
) -> Result<Vec<f64>, Dirac1dError> {
    let (w_lo, w_hi) = window;
    let mut out: Vec<f64> = Vec::new();
    for side in [1.0f64, -1.0] {
        let (abs_lo, abs_hi) = if side > 0.0 {
            (w_lo.max(m), w_hi)
        } else {
            ((-w_hi).max(m), -w_lo)
        };
        if abs_hi <= abs_lo || abs_hi <= m {
            continue;
        }
        let t_of = |x_abs: f64| ((x_abs * x_abs - m * m).max(0.0)).sqrt() * l;
        let x_of = |t: f64| side * (m * m + (t / l) * (t / l)).sqrt();
        let mismatch = |t: f64| -> Result<(f64, f64), Dirac1dError> {
            let u = integrate(l, m, x_of(t), left_phase)?;
            let r = (u[1] / u[0]) * right_phase.conj();
            Ok((r.im, r.re))
        };
        let t_end = t_of(abs_hi);
        let mut t = t_of(abs_lo).max(1e-6);
        if t >= t_end {
            continue;
        }
        let (mut sig_prev, _) = mismatch(t)?;
        while t < t_end {
            let big = (x_of(t).abs() + m) / (t / l).max(1e-300);
            let dt = 0.0625 * PI / big.max(1.0);
            let t_next = (t + dt).min(t_end);
            let (sig, _) = mismatch(t_next)?;
            if sig_prev == 0.0 || sig_prev * sig < 0.0 {
                // bisect the mismatch, then keep only non-antipodal crossings
                let (mut lo, mut hi, mut f_lo) = (t, t_next, sig_prev);
                for _ in 0..100 {
                    if hi - lo <= 1e-13 * hi.max(1.0) {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    let (f_mid, _) = mismatch(mid)?;
                    if f_lo * f_mid <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        f_lo = f_mid;
                    }
                }
                let t_root = 0.5 * (lo + hi);
                let (_, re) = mismatch(t_root)?;
                if re > 0.0 {
                    let x = x_of(t_root);
                    if x > w_lo && x < w_hi {
                        out.push(x);
                    }
                }
            }
            sig_prev = sig;
            t = t_next;
        }
    }
    out.sort_by(|p, q| p.abs().partial_cmp(&q.abs()).unwrap());
    out.truncate(max_count.max(1));
    out.sort_by(|p, q| p.partial_cmp(q).unwrap());
    Ok(out)
}

/// Spectrum of the gauge-rotated fiber problem from its cot-form secular
/// equation `sqrt(F) cot(sqrt(F) L) + m - x / z0 = 0`.
///
/// Conjugating the vertical-family operator by `diag(i, 1)` moves the left
/// trace phase to `-i` and the right one to `-i * ab_phase` while leaving
/// the spectrum of the conjugated operator equal to this equation's root
/// set; the roots therefore must agree with a direct shooting solve of the
/// rotated boundary problem.
pub fn cot_form_spectrum(
    tri: &RightTriangle,
    l: f64,
    m: Mass,
    window: (f64, f64),
    max_count: usize,
) -> Vec<f64> {
    let z0 = boundary_phases(tri).z0;
    let m = m.value();
    let coeff = 1.0 / z0;
    let (w_lo, w_hi) = window;
    let mut out = Vec::new();
    for side in [1.0f64, -1.0] {
        let (abs_lo, abs_hi) = if side > 0.0 {
            (w_lo.max(m), w_hi)
        } else {
            ((-w_hi).max(m), -w_lo)
        };
        if abs_hi <= abs_lo || abs_hi <= m {
            continue;
        }
        let t_of = |x_abs: f64| ((x_abs * x_abs - m * m).max(0.0)).sqrt() * l;
        let x_of = |t: f64| side * (m * m + (t / l) * (t / l)).sqrt();
        let f = |t: f64| (t / l) / t.tan() + m - coeff * x_of(t);
        let (t_lo, t_hi) = (t_of(abs_lo), t_of(abs_hi));
        let mut n = 0usize;
        loop {
            let b_lo = n as f64 * PI;
            let b_hi = (n as f64 + 1.0) * PI;
            if b_lo >= t_hi {
                break;
            }
            let lo = b_lo.max(t_lo) + 1e-9;
            let hi = b_hi.min(t_hi) - 1e-9;
            if lo < hi {
                let cells = 192;
                let mut prev = f(lo);
                let mut tp = lo;
                for i in 1..=cells {
                    let t = lo + (hi - lo) * i as f64 / cells as f64;
                    let v = f(t);
                    if prev * v < 0.0 {
                        let (mut bl, mut bh, mut fl) = (tp, t, prev);
                        for _ in 0..100 {
                            if bh - bl <= 1e-14 * bh.max(1.0) {
                                break;
                            }
                            let mid = 0.5 * (bl + bh);
                            let fm = f(mid);
                            if fl * fm <= 0.0 {
                                bh = mid;
                            } else {
                                bl = mid;
                                fl = fm;
                            }
                        }
                        let x = x_of(0.5 * (bl + bh));
                        if x > w_lo && x < w_hi {
                            out.push(x);
                        }
                    }
                    prev = v;
                    tp = t;
                }
            }
            n += 1;
        }
    }
    out.sort_by(|p, q| p.abs().partial_cmp(&q.abs()).unwrap());
    out.truncate(max_count.max(1));
    out.sort_by(|p, q| p.partial_cmp(q).unwrap());
    out
}

/// Outcome of [`unitary_equivalence_check`].
#[derive(Debug, Clone)]
pub struct UnitaryEquivalence {
    pub agree: bool,
    pub max_relative_deviation: f64,
    pub secular: Vec<f64>,
    pub shooting: Vec<f64>,
    pub note: Option<String>,
}

/// Checks, at the level of spectra, that the gauge-rotated fiber problem
/// (left phase `-i`, right phase `-i * ab_phase`) solved by shooting agrees
/// with its cot-form secular equation to `1e-10`.
pub fn unitary_equivalence_check(
    tri: &RightTriangle,
    l: f64,
    m: Mass,
    window: (f64, f64),
    max_count: usize,
) -> Result<UnitaryEquivalence, Dirac1dError> {
    let secular = cot_form_spectrum(tri, l, m, window, max_count);
    let rotated_right = -Complex64::i() * boundary_phases(tri).ab_phase;
    let shooting = shooting_spectrum_with_phases(
        l,
        m.value(),
        Complex64::new(0.0, -1.0),
        rotated_right,
        window,
        max_count,
    )?;
    if secular.len() != shooting.len() {
        return Ok(UnitaryEquivalence {
            agree: false,
            max_relative_deviation: f64::INFINITY,
            note: Some(format!(
                "cardinality mismatch: {} secular roots vs {} shooting roots",
                secular.len(),
                shooting.len()
            )),
            secular,
            shooting,
        });
    }
    let mut max_dev = 0.0f64;
    for (s, t) in secular.iter().zip(&shooting) {
        max_dev = max_dev.max((s - t).abs() / s.abs().max(1.0));
    }
    Ok(UnitaryEquivalence {
        agree: max_dev <= 1e-10,
        max_relative_deviation: max_dev,
        secular,
        shooting,
        note: None,
    })
}
