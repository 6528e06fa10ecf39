//! Threshold crossings of the quadratic log-wealth lower bound.

use crate::types::Interval;

/// Relative size below which the leading coefficient is treated as zero.
const DEGENERATE_REL: f64 = 1e-12;

/// Largest `v` in `domain` with `q0 + q1 v + q2 v^2 >= thresh`, provided the
/// equation `q0 + q1 v + q2 v^2 = thresh` has a real root.
///
/// For the concave bounds produced by the engines (`q2 <= 0`) this is the
/// largest root clamped into the domain. Returns `None` when there are no real
/// roots or when the super-level set misses the domain. A constant that sits
/// at or above the threshold yields the upper end of the domain.
pub fn largest_root_at_threshold(
    q0: f64,
    q1: f64,
    q2: f64,
    thresh: f64,
    domain: Interval,
) -> Option<f64> {
    let c = q0 - thresh;
    let (lo, hi) = (domain.lo, domain.hi);
    if !(c.is_finite() && q1.is_finite() && q2.is_finite()) || domain.is_empty() {
        return None;
    }
    // sup of [a, b] intersected with the domain.
    let sup_within = |a: f64, b: f64| (a <= hi && b >= lo).then(|| b.min(hi));

    if q2 == 0.0 || q2.abs() <= DEGENERATE_REL * (q1.abs() + c.abs()) {
        if q1 == 0.0 || q1.abs() <= DEGENERATE_REL * c.abs() {
            return (c >= 0.0).then_some(hi);
        }
        let root = -c / q1;
        return if q1 > 0.0 {
            sup_within(root, f64::INFINITY)
        } else {
            sup_within(f64::NEG_INFINITY, root)
        };
    }

    let disc = q1 * q1 - 4.0 * q2 * c;
    if disc < 0.0 {
        return None;
    }
    // Numerically stable pair of roots.
    let s = disc.sqrt();
    let sign = if q1 >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (q1 + sign * s);
    let (ra, rb) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        (q / q2, c / q)
    };
    let (r1, r2) = if ra <= rb { (ra, rb) } else { (rb, ra) };

    if q2 < 0.0 {
        sup_within(r1, r2)
    } else {
        let right = sup_within(r2, f64::INFINITY);
        let left = sup_within(f64::NEG_INFINITY, r1);
        match (left, right) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }
}
