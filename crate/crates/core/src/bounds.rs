//! Quadratic lower bounds on `ln(1 + x)` used to keep log wealth tractable.

use crate::error::{Error, Result};

/// `2 - 4 ln 2`, the curvature of the quadratic bound on `ln(1+x)` for
/// `x >= -1/2`. The bound is tight at `x = 0` and `x = -1/2`.
pub const PSI: f64 = 2.0 - 4.0 * std::f64::consts::LN_2;

/// `x + PSI x^2`, a lower bound on `ln(1+x)` valid for `x >= -1/2`.
pub fn log1p_quad_lower(x: f64) -> Result<f64> {
    if !(x >= -0.5) {
        return Err(Error::domain("log1p_quad_lower", format!("x = {x} < -1/2")));
    }
    Ok(log1p_quad_lower_unchecked(x))
}

#[inline]
pub(crate) fn log1p_quad_lower_unchecked(x: f64) -> f64 {
    x + PSI * x * x
}

/// Coefficient of `xi^2` in the scalar bound: `ln(1 - lam) + lam`.
#[inline]
pub fn fan_curvature(lam: f64) -> f64 {
    (-lam).ln_1p() + lam
}

/// `lam xi + (ln(1-lam) + lam) xi^2`, a lower bound on `ln(1 + lam xi)` valid
/// for `xi >= -1` and `0 <= lam < 1`. Equality holds at `xi = -1`.
pub fn fan_lower(lam: f64, xi: f64) -> Result<f64> {
    if !(xi >= -1.0) {
        return Err(Error::domain("fan_lower", format!("xi = {xi} < -1")));
    }
    if !(0.0..1.0).contains(&lam) {
        return Err(Error::domain("fan_lower", format!("lam = {lam} outside [0,1)")));
    }
    Ok(lam * xi + fan_curvature(lam) * xi * xi)
}
