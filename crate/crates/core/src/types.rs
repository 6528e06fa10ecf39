use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on range checks of logged quantities.
const RANGE_TOL: f64 = 1e-9;

/// Confidence level and weight bound shared by every engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub alpha: f64,
    pub w_max: f64,
}

impl Config {
    pub fn new(alpha: f64, w_max: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0,1), got {alpha}"
            )));
        }
        if !(w_max >= 1.0 && w_max.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "w_max must be a finite value >= 1, got {w_max}"
            )));
        }
        Ok(Self { alpha, w_max })
    }

    /// `w_max - 1`, the largest value of the `w - 1` outcome.
    pub fn w_excess(&self) -> f64 {
        self.w_max - 1.0
    }

    /// Log of the Ville threshold for a wealth split `ways` ways.
    pub fn log_threshold(&self, ways: u32) -> f64 {
        (f64::from(ways) / self.alpha).ln()
    }
}

/// One logged interaction reduced to importance weight, reward and an
/// optional control variate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogSample {
    pub w: f64,
    pub r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

impl LogSample {
    pub fn new(w: f64, r: f64) -> Self {
        Self { w, r, c: None }
    }

    pub fn with_cv(w: f64, r: f64, c: f64) -> Self {
        Self { w, r, c: Some(c) }
    }

    /// Checks `0 <= w <= w_max`, `0 <= r <= 1` and, when present, that the
    /// control variate is attainable for this `w`.
    ///
    /// With `q` in `[0,1]` and every logging probability at least `1/w_max`,
    /// `c = w q(a) - sum_a' pi(a') q(a')` lies in `[w/w_max - 1, w - w/w_max]`.
    pub fn validate(&self, cfg: &Config) -> Result<()> {
        if !(self.w >= 0.0 && self.w <= cfg.w_max * (1.0 + RANGE_TOL)) {
            return Err(Error::SampleOutOfRange(format!(
                "w = {} outside [0, {}]",
                self.w, cfg.w_max
            )));
        }
        if !(self.r >= 0.0 && self.r <= 1.0) {
            return Err(Error::SampleOutOfRange(format!(
                "r = {} outside [0, 1]",
                self.r
            )));
        }
        if let Some(c) = self.c {
            let lo = self.w / cfg.w_max - 1.0;
            let hi = self.w - self.w / cfg.w_max;
            if !(c >= lo - RANGE_TOL && c <= hi + RANGE_TOL) {
                return Err(Error::SampleOutOfRange(format!(
                    "c = {c} outside [{lo}, {hi}] for w = {}",
                    self.w
                )));
            }
        }
        Ok(())
    }
}

/// The pair of fractions risked on `w - 1` and on the value outcome.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Bet {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Bet {
    pub const ZERO: Bet = Bet {
        lambda1: 0.0,
        lambda2: 0.0,
    };

    pub fn new(lambda1: f64, lambda2: f64) -> Self {
        Self { lambda1, lambda2 }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.lambda1, self.lambda2]
    }

    pub fn norm(&self) -> f64 {
        self.lambda1.hypot(self.lambda2)
    }
}

impl From<[f64; 2]> for Bet {
    fn from(l: [f64; 2]) -> Self {
        Bet::new(l[0], l[1])
    }
}

/// A closed interval `[lo, hi]`. An interval with `lo > hi` is the flagged
/// empty result of intersecting disjoint sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::domain("Interval::new", format!("[{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// Builds an interval without checking ordering; used for flagged-empty
    /// results.
    pub const fn raw(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };
    pub const SYMMETRIC_UNIT: Interval = Interval { lo: -1.0, hi: 1.0 };

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval::raw(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lo).min(self.hi)
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_empty() {
            write!(f, "empty([{:.6}, {:.6}])", self.lo, self.hi)
        } else {
            write!(f, "[{:.6}, {:.6}]", self.lo, self.hi)
        }
    }
}
