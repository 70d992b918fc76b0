//! Cornish–Fisher shift turning a score into its α-quantile modified form.

use crate::cumulants::CumulantSet;
use crate::error::{Error, Result};
use crate::specialfn::norm_quantile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileShift {
    pub alpha: f64,
    pub u_alpha: f64,
    /// Additive modification `M`.
    pub m: f64,
}

/// Shift `M` such that the root of `U + M` is an α-quantile estimator.
pub fn cornish_fisher_shift(c: &CumulantSet, alpha: f64) -> Result<QuantileShift> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let u = norm_quantile(alpha)?;
    Ok(QuantileShift { alpha, u_alpha: u, m: shift_at(c, u)? })
}

/// `M` for a precomputed normal quantile `u`.
pub fn shift_at(c: &CumulantSet, u: f64) -> Result<f64> {
    if !(c.k2 > 0.0) {
        return Err(Error::DegenerateInformation { k2: c.k2 });
    }
    let s = c.k2.sqrt();
    let u2 = u * u;
    let u3 = u2 * u;
    let m = -c.k1 - u * s - c.k3 / c.k2 * (u2 - 1.0) / 6.0 - c.k4 / (c.k2 * s) * (u3 - 3.0 * u) / 24.0
        + c.k3 * c.k3 / (c.k2 * c.k2 * s) * (2.0 * u3 - 5.0 * u) / 36.0;
    if !m.is_finite() {
        return Err(Error::domain(format!("non-finite quantile shift from cumulants {c:?}")));
    }
    Ok(m)
}

/// `U + M` evaluated at one parameter point.
pub fn modified_score(u_value: f64, c: &CumulantSet, alpha: f64) -> Result<f64> {
    Ok(u_value + cornish_fisher_shift(c, alpha)?.m)
}
