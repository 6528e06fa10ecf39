use crate::error::{Error, Result};
use crate::region::FeasibleRegion;

use super::history::Term;

const MAX_NEWTON: usize = 200;
const BISECT_STEPS: usize = 80;

/// Maximizes `f(l) = sum_i count_i ln(1 + l1 u1_i + l2 (u2_i - v))` over
/// `reg`, returning the maximizer and `f` there.
///
/// `f` is concave, so its maximum over the polygon is either the
/// unconstrained maximizer, when that lies inside, or a point on the
/// boundary. The first is found by damped Newton from the origin, the second
/// by maximizing along every edge. `start`, if given and strictly inside the
/// domain of `f`, replaces the origin as the Newton starting point.
pub fn maximize_log_wealth(
    terms: &[Term],
    v: f64,
    reg: &FeasibleRegion,
    start: Option<[f64; 2]>,
) -> Result<([f64; 2], f64)> {
    let prob = Problem { terms, v };
    let x0 = match start {
        Some(s) if prob.objective(s).is_finite() => s,
        _ => [0.0, 0.0],
    };
    if !prob.objective(x0).is_finite() {
        return Err(Error::domain("maximize_log_wealth", "origin outside the domain"));
    }
    if let Some(x) = prob.newton(x0) {
        if reg.contains(x, 0.0) {
            return Ok((x, prob.objective(x)));
        }
    }
    let mut best: Option<([f64; 2], f64)> = None;
    for (p, q) in reg.edges() {
        let x = prob.edge_max(p, q);
        let f = prob.objective(x);
        if best.is_none_or(|(_, bf)| f > bf) {
            best = Some((x, f));
        }
    }
    match best {
        Some((x, f)) if f.is_finite() => Ok((x, f)),
        _ => Err(Error::NoConvergence("no finite objective on the region boundary".into())),
    }
}

struct Problem<'a> {
    terms: &'a [Term],
    v: f64,
}

impl Problem<'_> {
    /// `f(x)`, or `-inf` outside its domain.
    fn objective(&self, x: [f64; 2]) -> f64 {
        let mut total = 0.0;
        for t in self.terms {
            let m = 1.0 + x[0] * t.u1 + x[1] * (t.u2 - self.v);
            if !(m > 0.0) {
                return f64::NEG_INFINITY;
            }
            total += t.count * m.ln();
        }
        total
    }

    fn derivatives(&self, x: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
        let mut g = [0.0; 2];
        let mut h = [[0.0; 2]; 2];
        for t in self.terms {
            let b = [t.u1, t.u2 - self.v];
            let inv = 1.0 / (1.0 + x[0] * b[0] + x[1] * b[1]);
            g[0] += t.count * b[0] * inv;
            g[1] += t.count * b[1] * inv;
            let c = t.count * inv * inv;
            h[0][0] -= c * b[0] * b[0];
            h[0][1] -= c * b[0] * b[1];
            h[1][1] -= c * b[1] * b[1];
        }
        h[1][0] = h[0][1];
        (g, h)
    }

    /// Unconstrained maximizer, if damped Newton finds one.
    fn newton(&self, mut x: [f64; 2]) -> Option<[f64; 2]> {
        let mut f0 = self.objective(x);
        for _ in 0..MAX_NEWTON {
            let (g, h) = self.derivatives(x);
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            let scale = h[0][0].abs().max(h[1][1].abs());
            if !(det > 1e-14 * scale * scale) {
                return None;
            }
            let d = [
                -(h[1][1] * g[0] - h[0][1] * g[1]) / det,
                -(-h[1][0] * g[0] + h[0][0] * g[1]) / det,
            ];
            let decrement = g[0] * d[0] + g[1] * d[1];
            if decrement <= 1e-13 * f0.abs().max(1.0) {
                return Some(x);
            }
            let mut step = 1.0;
            loop {
                let y = [x[0] + step * d[0], x[1] + step * d[1]];
                let fy = self.objective(y);
                if fy >= f0 + 0.25 * step * decrement {
                    x = y;
                    f0 = fy;
                    break;
                }
                step *= 0.5;
                if step < 1e-12 {
                    // Rounding-limited: x is as good as Newton can certify.
                    return Some(x);
                }
            }
            if x[0].abs().max(x[1].abs()) > crate::region::BOX_HALF_WIDTH {
                return None;
            }
        }
        None
    }

    /// Maximizer of `f` on the segment `[p, q]`, by bisection on the
    /// directional derivative.
    fn edge_max(&self, p: [f64; 2], q: [f64; 2]) -> [f64; 2] {
        let d = [q[0] - p[0], q[1] - p[1]];
        let at = |s: f64| [p[0] + s * d[0], p[1] + s * d[1]];
        let slope = |s: f64| -> f64 {
            let x = at(s);
            let mut total = 0.0;
            for t in self.terms {
                let b1 = t.u2 - self.v;
                let m = 1.0 + x[0] * t.u1 + x[1] * b1;
                total += t.count * (d[0] * t.u1 + d[1] * b1) / m;
            }
            total
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..BISECT_STEPS {
            let mid = 0.5 * (lo + hi);
            if !self.objective(at(mid)).is_finite() {
                // Off the domain near one end: move towards the finite part.
                if self.objective(at(lo)).is_finite() { hi = mid } else { lo = mid }
                continue;
            }
            if slope(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let cands = [at(0.0), at(1.0), at(0.5 * (lo + hi))];
        let mut best = cands[2];
        let mut bf = self.objective(best);
        for c in &cands[..2] {
            let f = self.objective(*c);
            if f > bf {
                best = *c;
                bf = f;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{region, RegionKind};
    use crate::types::Config;

    fn grid_best(terms: &[Term], v: f64, reg: &FeasibleRegion, step: f64) -> f64 {
        let (lo, hi) = bounds(reg);
        let mut best = f64::NEG_INFINITY;
        let mut x = lo[0];
        while x <= hi[0] {
            let mut y = lo[1];
            while y <= hi[1] {
                if reg.contains([x, y], 0.0) {
                    let f: f64 = terms
                        .iter()
                        .map(|t| {
                            let m = 1.0 + x * t.u1 + y * (t.u2 - v);
                            if m > 0.0 { t.count * m.ln() } else { f64::NEG_INFINITY }
                        })
                        .sum();
                    best = best.max(f);
                }
                y += step;
            }
            x += step;
        }
        best
    }

    fn bounds(reg: &FeasibleRegion) -> ([f64; 2], [f64; 2]) {
        let vs = reg.vertices();
        let lo = [vs.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min), vs.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min)];
        let hi = [vs.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max), vs.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max)];
        (lo, hi)
    }

    #[test]
    fn matches_grid_search() {
        let cfg = Config::new(0.05, 2.0).unwrap();
        let reg = region(RegionKind::C, &cfg).unwrap();
        let terms = [
            Term { u1: 1.0, u2: 2.0, count: 3.0 },
            Term { u1: -1.0, u2: 0.0, count: 2.0 },
            Term { u1: -0.5, u2: 0.5, count: 1.0 },
        ];
        for v in [0.2, 0.5, 0.8] {
            let (x, f) = maximize_log_wealth(&terms, v, &reg, None).unwrap();
            assert!(reg.contains(x, 1e-12));
            let g = grid_best(&terms, v, &reg, 1e-3);
            assert!(f >= g - 1e-9, "v={v}: {f} < {g}");
            assert!(f <= g + 1e-2);
        }
    }

    #[test]
    fn warm_start_agrees() {
        let cfg = Config::new(0.05, 10.0).unwrap();
        let reg = region(RegionKind::C, &cfg).unwrap();
        let terms = [
            Term { u1: 9.0, u2: 10.0, count: 1.0 },
            Term { u1: -1.0, u2: 0.0, count: 8.0 },
        ];
        let (_, f1) = maximize_log_wealth(&terms, 0.3, &reg, None).unwrap();
        let (_, f2) = maximize_log_wealth(&terms, 0.3, &reg, Some([0.01, 0.01])).unwrap();
        assert!((f1 - f2).abs() < 1e-8);
    }
}
