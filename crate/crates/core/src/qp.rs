//! Exact maximizer of `PSI * l' A l + l' b` over a two-variable polygon.
//!
//! The objective is concave (`PSI < 0`, `A` positive semidefinite), so the
//! maximum is either the unconstrained stationary point or lies on a face.
//! Faces are one-dimensional concave quadratics with closed-form maxima, which
//! also covers a rank-deficient `A` where no inverse exists.

use crate::bounds::PSI;
use crate::error::{Error, Result};
use crate::region::FeasibleRegion;
use crate::types::Bet;

const PSD_TOL: f64 = 1e-10;
const SINGULAR_REL: f64 = 1e-12;
const FEASIBLE_TOL: f64 = 1e-12;

/// `PSI * l' A l + l' b` with `A` symmetric positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadObjective {
    a: [[f64; 2]; 2],
    b: [f64; 2],
}

impl QuadObjective {
    pub fn new(a: [[f64; 2]; 2], b: [f64; 2]) -> Result<Self> {
        let finite = a.iter().flatten().chain(b.iter()).all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidObjective("non-finite coefficient".into()));
        }
        let scale = 1.0 + a[0][1].abs().max(a[1][0].abs());
        if (a[0][1] - a[1][0]).abs() > 1e-12 * scale {
            return Err(Error::InvalidObjective(format!("A not symmetric: {a:?}")));
        }
        let obj = Self::from_parts_unchecked(a, b);
        let (lo, _) = obj.eigenvalues();
        let tr_scale = 1.0 + a[0][0].abs() + a[1][1].abs();
        if lo < -PSD_TOL * tr_scale {
            return Err(Error::InvalidObjective(format!(
                "A not positive semidefinite (eigenvalue {lo})"
            )));
        }
        Ok(obj)
    }

    /// Skips validation; the engines build `A` from sums of outer products.
    pub(crate) fn from_parts_unchecked(a: [[f64; 2]; 2], b: [f64; 2]) -> Self {
        let off = 0.5 * (a[0][1] + a[1][0]);
        Self {
            a: [[a[0][0], off], [off, a[1][1]]],
            b,
        }
    }

    pub fn a(&self) -> [[f64; 2]; 2] {
        self.a
    }

    pub fn b(&self) -> [f64; 2] {
        self.b
    }

    #[inline]
    pub fn value(&self, l: [f64; 2]) -> f64 {
        let a = &self.a;
        let quad = a[0][0] * l[0] * l[0] + 2.0 * a[0][1] * l[0] * l[1] + a[1][1] * l[1] * l[1];
        PSI * quad + self.b[0] * l[0] + self.b[1] * l[1]
    }

    #[inline]
    fn gradient(&self, l: [f64; 2]) -> [f64; 2] {
        let a = &self.a;
        [
            2.0 * PSI * (a[0][0] * l[0] + a[0][1] * l[1]) + self.b[0],
            2.0 * PSI * (a[0][1] * l[0] + a[1][1] * l[1]) + self.b[1],
        ]
    }

    fn eigenvalues(&self) -> (f64, f64) {
        let a = &self.a;
        let mean = 0.5 * (a[0][0] + a[1][1]);
        let half_diff = 0.5 * (a[0][0] - a[1][1]);
        let r = half_diff.hypot(a[0][1]);
        (mean - r, mean + r)
    }
}

/// How the maximizer was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    /// Unconstrained stationary point with invertible `A`.
    Interior,
    /// Best candidate on the polygon boundary.
    Boundary,
    /// `A` is singular; the minimum-norm stationary point (or a boundary
    /// point) was used instead of the inverse formula.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpSolution {
    pub bet: Bet,
    pub objective: f64,
    pub resolution: Resolution,
}

/// Maximizes `obj` over `reg`.
///
/// Tries the unconstrained stationary point first; otherwise evaluates the
/// best point of every face and every vertex. Ties are broken towards the
/// smallest `|lambda|`.
pub fn argmax_quadratic(obj: &QuadObjective, reg: &FeasibleRegion) -> QpSolution {
    let a = &obj.a;
    let trace = a[0][0] + a[1][1];
    let det = a[0][0] * a[1][1] - a[0][1] * a[0][1];
    let singular = trace <= 0.0 || det <= SINGULAR_REL * trace * trace;

    if let Some(l) = stationary_point(obj, singular, trace, det) {
        if reg.contains(l, FEASIBLE_TOL) {
            return QpSolution {
                bet: l.into(),
                objective: obj.value(l),
                resolution: if singular {
                    Resolution::Degenerate
                } else {
                    Resolution::Interior
                },
            };
        }
    }

    let mut best = Candidate::new(obj, [0.0, 0.0]);
    for &v in reg.vertices() {
        best.offer(obj, v);
    }
    for (p, q) in reg.edges() {
        best.offer(obj, face_max(obj, p, q));
    }
    QpSolution {
        bet: best.point.into(),
        objective: best.value,
        resolution: if singular {
            Resolution::Degenerate
        } else {
            Resolution::Boundary
        },
    }
}

/// Solves `2 PSI A l = -b`, returning the minimum-norm solution when `A` is
/// singular and `b` lies in its range.
fn stationary_point(obj: &QuadObjective, singular: bool, trace: f64, det: f64) -> Option<[f64; 2]> {
    let a = &obj.a;
    let b = obj.b;
    if !singular {
        // l = -(2 PSI A)^{-1} b
        let k = -1.0 / (2.0 * PSI * det);
        return Some([
            k * (a[1][1] * b[0] - a[0][1] * b[1]),
            k * (-a[0][1] * b[0] + a[0][0] * b[1]),
        ]);
    }
    let b_norm = b[0].hypot(b[1]);
    if trace <= 0.0 {
        return (b_norm == 0.0).then_some([0.0, 0.0]);
    }
    // Rank one: A ~ trace * u u'.
    let (_, top) = obj.eigenvalues();
    let u = if a[0][0] >= a[1][1] {
        normalize([a[0][0], a[0][1]])
    } else {
        normalize([a[0][1], a[1][1]])
    }?;
    let ub = u[0] * b[0] + u[1] * b[1];
    let resid = [b[0] - ub * u[0], b[1] - ub * u[1]];
    if resid[0].hypot(resid[1]) > 1e-9 * b_norm.max(f64::MIN_POSITIVE) && b_norm > 0.0 {
        return None;
    }
    let s = -ub / (2.0 * PSI * top);
    Some([s * u[0], s * u[1]])
}

fn normalize(v: [f64; 2]) -> Option<[f64; 2]> {
    let n = v[0].hypot(v[1]);
    (n > 0.0).then(|| [v[0] / n, v[1] / n])
}

/// Maximum of the objective on the segment `[p, q]`.
fn face_max(obj: &QuadObjective, p: [f64; 2], q: [f64; 2]) -> [f64; 2] {
    let d = [q[0] - p[0], q[1] - p[1]];
    let g = obj.gradient(p);
    let slope = g[0] * d[0] + g[1] * d[1];
    let a = &obj.a;
    let curv = PSI * (a[0][0] * d[0] * d[0] + 2.0 * a[0][1] * d[0] * d[1] + a[1][1] * d[1] * d[1]);
    let scale = slope.abs() + curv.abs();
    let s = if curv < -1e-14 * scale.max(f64::MIN_POSITIVE) && curv < 0.0 {
        (-slope / (2.0 * curv)).clamp(0.0, 1.0)
    } else if slope > 0.0 {
        1.0
    } else if slope < 0.0 {
        0.0
    } else {
        // Flat face: closest point to the origin.
        let dd = d[0] * d[0] + d[1] * d[1];
        if dd > 0.0 {
            (-(p[0] * d[0] + p[1] * d[1]) / dd).clamp(0.0, 1.0)
        } else {
            0.0
        }
    };
    [p[0] + s * d[0], p[1] + s * d[1]]
}

struct Candidate {
    point: [f64; 2],
    value: f64,
    norm: f64,
}

impl Candidate {
    fn new(obj: &QuadObjective, p: [f64; 2]) -> Self {
        Self {
            point: p,
            value: obj.value(p),
            norm: p[0].hypot(p[1]),
        }
    }

    fn offer(&mut self, obj: &QuadObjective, p: [f64; 2]) {
        let value = obj.value(p);
        let norm = p[0].hypot(p[1]);
        let tol = 1e-12 * (1.0 + value.abs().max(self.value.abs()));
        let better = value > self.value + tol || (value >= self.value - tol && norm < self.norm);
        if better {
            *self = Self {
                point: p,
                value,
                norm,
            };
        }
    }
}
