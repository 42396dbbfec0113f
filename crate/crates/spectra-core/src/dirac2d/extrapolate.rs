//! Richardson extrapolation with a fitted convergence order.
//!
//! Corner singularities make the a-priori order unreliable, so the model
//! `mu(n) = mu* + C n^{-p}` is fitted from the last three ladder points and
//! `p` is reported alongside the limit.

use super::Dirac2dError;

#[derive(Debug, Clone, Copy)]
pub struct Extrapolation {
    /// Extrapolated limit (or the finest raw value when declined).
    pub value: f64,
    /// Fitted convergence order; `None` when extrapolation was declined.
    pub order: Option<f64>,
    /// Error bar: safety-factored final correction, or the last observed
    /// difference when declined.
    pub error_bound: f64,
    /// Set when the sequence was not usable (non-monotone differences or a
    /// non-contracting ratio); `value` is then the finest raw value.
    pub declined: bool,
}

/// Extrapolates `(n, mu(n))` ladder data. Requires at least three points
/// with a constant resolution ratio; uses the last three.
pub fn extrapolate(points: &[(usize, f64)]) -> Result<Extrapolation, Dirac2dError> {
    if points.len() < 3 {
        return Err(Dirac2dError::BadLadder(
            points.iter().map(|p| p.0).collect(),
        ));
    }
    let tail = &points[points.len() - 3..];
    let (n1, mu1) = tail[0];
    let (n2, mu2) = tail[1];
    let (n3, mu3) = tail[2];
    if n1 == 0 || n2 % n1 != 0 || n2 / n1 < 2 || n3 * n1 != n2 * n2 {
        return Err(Dirac2dError::BadLadder(
            points.iter().map(|p| p.0).collect(),
        ));
    }
    let r = n2 as f64 / n1 as f64;
    let d1 = mu1 - mu2;
    let d2 = mu2 - mu3;
    let q = d2 / d1;
    if !(q > 0.0 && q < 1.0) {
        return Ok(Extrapolation {
            value: mu3,
            order: None,
            error_bound: d2.abs().max(d1.abs()),
            declined: true,
        });
    }
    let p = -q.ln() / r.ln();
    let correction = d2 * q / (1.0 - q);
    Ok(Extrapolation {
        value: mu3 - correction,
        order: Some(p),
        error_bound: 1.25 * correction.abs() + 1e-12 * mu3.abs(),
        declined: false,
    })
}
