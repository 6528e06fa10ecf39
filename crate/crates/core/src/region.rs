//! Feasible bet regions: two-variable polygons given as half-plane lists.

use crate::error::{Error, Result};
use crate::types::Config;

/// Half-width of the box used to close unbounded regions when enumerating
/// vertices.
pub const BOX_HALF_WIDTH: f64 = 1e6;

const CLIP_TOL: f64 = 1e-12;

/// The constraint `a . lambda >= d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub a: [f64; 2],
    pub d: f64,
}

impl HalfPlane {
    pub const fn new(a: [f64; 2], d: f64) -> Self {
        Self { a, d }
    }

    #[inline]
    pub fn slack(&self, l: [f64; 2]) -> f64 {
        self.a[0] * l[0] + self.a[1] * l[1] - self.d
    }
}

/// Which region to build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionKind {
    /// Common bets for the plain process: valid with margin 1/2 for every
    /// `v` in `[0,1]`, with `lambda2 >= 0`.
    C,
    /// Common bets for the reward-predictor process, with `lambda2 >= 0`.
    Cq,
    /// Common bets for the gated process, with `lambda2 >= 0`.
    G,
    /// Bets keeping every multiplier `>= m` at a fixed `v` (plain outcomes).
    Dv { v: f64, m: f64 },
    /// Bets keeping every multiplier `>= m` at a fixed `v` (predictor outcomes).
    Ev { v: f64, m: f64 },
    /// Gated bets keeping every multiplier `>= m` for all `v` in `[0,1]`.
    Gv { m: f64 },
}

/// A convex polygon `{lambda : a_i . lambda >= d_i}` together with its
/// vertices (counter-clockwise). Unbounded regions are closed with a large box.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleRegion {
    halfplanes: Vec<HalfPlane>,
    vertices: Vec<[f64; 2]>,
}

impl FeasibleRegion {
    pub fn new(halfplanes: Vec<HalfPlane>) -> Result<Self> {
        for h in &halfplanes {
            if !(h.a.iter().all(|x| x.is_finite()) && h.d.is_finite()) {
                return Err(Error::InfeasibleRegion(format!("non-finite half-plane {h:?}")));
            }
        }
        if let Some(h) = halfplanes.iter().find(|h| h.slack([0.0, 0.0]) < -CLIP_TOL) {
            return Err(Error::InfeasibleRegion(format!(
                "origin violates {:?}",
                h
            )));
        }
        let poly = enumerate_vertices(&halfplanes);
        if poly.is_empty() {
            return Err(Error::InfeasibleRegion("empty polygon".into()));
        }
        Ok(Self {
            halfplanes,
            vertices: poly,
        })
    }

    pub fn halfplanes(&self) -> &[HalfPlane] {
        &self.halfplanes
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Polygon edges as consecutive vertex pairs.
    pub fn edges(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Smallest constraint slack; non-negative inside.
    pub fn min_slack(&self, l: [f64; 2]) -> f64 {
        self.halfplanes
            .iter()
            .map(|h| h.slack(l))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, l: [f64; 2], tol: f64) -> bool {
        self.halfplanes.iter().all(|h| h.slack(l) >= -tol)
    }

    /// Adds constraints, recomputing the vertices.
    pub fn intersect(&self, extra: &[HalfPlane]) -> Result<Self> {
        let mut hp = self.halfplanes.clone();
        hp.extend_from_slice(extra);
        Self::new(hp)
    }
}

/// Vertices of the region closed by the box, counter-clockwise. Each vertex
/// is the intersection of two constraint lines, computed directly so that
/// it satisfies both to rounding precision.
fn enumerate_vertices(halfplanes: &[HalfPlane]) -> Vec<[f64; 2]> {
    let b = BOX_HALF_WIDTH;
    let mut lines: Vec<HalfPlane> = halfplanes.to_vec();
    lines.extend([
        HalfPlane::new([1.0, 0.0], -b),
        HalfPlane::new([-1.0, 0.0], -b),
        HalfPlane::new([0.0, 1.0], -b),
        HalfPlane::new([0.0, -1.0], -b),
    ]);
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (p, q) = (lines[i], lines[j]);
            let det = p.a[0] * q.a[1] - p.a[1] * q.a[0];
            let norm = (p.a[0].hypot(p.a[1])) * (q.a[0].hypot(q.a[1]));
            if det.abs() <= 1e-14 * norm {
                continue;
            }
            let x = [
                (p.d * q.a[1] - p.a[1] * q.d) / det,
                (p.a[0] * q.d - p.d * q.a[0]) / det,
            ];
            let tol = CLIP_TOL * (1.0 + x[0].abs().max(x[1].abs()));
            let feasible = lines.iter().all(|h| h.slack(x) >= -tol * (1.0 + h.a[0].abs() + h.a[1].abs()));
            if feasible && !pts.iter().any(|y| close(*y, x)) {
                pts.push(x);
            }
        }
    }
    if pts.is_empty() {
        return pts;
    }
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    pts.sort_by(|p, q| {
        let ap = (p[1] - cy).atan2(p[0] - cx);
        let aq = (q[1] - cy).atan2(q[0] - cx);
        ap.total_cmp(&aq)
    });
    pts
}

fn close(a: [f64; 2], b: [f64; 2]) -> bool {
    let scale = 1.0 + a[0].abs().max(a[1].abs());
    (a[0] - b[0]).abs() <= 1e-12 * scale && (a[1] - b[1]).abs() <= 1e-12 * scale
}

/// Builds the half-plane description of `kind` for the given configuration.
pub fn region(kind: RegionKind, cfg: &Config) -> Result<FeasibleRegion> {
    let w = cfg.w_excess();
    let half = -0.5;
    let check_v = |v: f64| {
        if (0.0..=1.0).contains(&v) {
            Ok(())
        } else {
            Err(Error::domain("region", format!("v = {v} outside [0,1]")))
        }
    };
    let check_m = |m: f64| {
        if (0.0..=1.0).contains(&m) {
            Ok(())
        } else {
            Err(Error::domain("region", format!("margin m = {m} outside [0,1]")))
        }
    };
    let nonneg_l2 = HalfPlane::new([0.0, 1.0], 0.0);
    let hp = match kind {
        RegionKind::C => vec![
            nonneg_l2,
            HalfPlane::new([-1.0, -1.0], half),
            HalfPlane::new([w, -1.0], half),
        ],
        RegionKind::Cq => vec![
            nonneg_l2,
            HalfPlane::new([-1.0, -1.0], half),
            HalfPlane::new([-1.0, 1.0], half),
            HalfPlane::new([w, -w - 1.0], half),
            HalfPlane::new([w, w + 1.0], half),
        ],
        RegionKind::G => vec![
            nonneg_l2,
            HalfPlane::new([w, -1.0], half),
            HalfPlane::new([-1.0, -2.0], half),
        ],
        RegionKind::Dv { v, m } => {
            check_v(v)?;
            check_m(m)?;
            let mut out = Vec::with_capacity(4);
            for wc in [0.0, cfg.w_max] {
                for rc in [0.0, 1.0] {
                    out.push(HalfPlane::new([wc - 1.0, wc * rc - v], m - 1.0));
                }
            }
            out
        }
        RegionKind::Ev { v, m } => {
            check_v(v)?;
            check_m(m)?;
            let vp = 1.0 - v;
            vec![
                HalfPlane::new([-1.0, -v], m - 1.0),
                HalfPlane::new([-1.0, vp], m - 1.0),
                HalfPlane::new([w, -w - v], m - 1.0),
                HalfPlane::new([w, w + vp], m - 1.0),
            ]
        }
        RegionKind::Gv { m } => {
            check_m(m)?;
            vec![
                HalfPlane::new([-1.0, -2.0], m - 1.0),
                HalfPlane::new([-1.0, 0.0], m - 1.0),
                HalfPlane::new([w, -1.0], m - 1.0),
                HalfPlane::new([w, w], m - 1.0),
            ]
        }
    };
    FeasibleRegion::new(hp)
}
