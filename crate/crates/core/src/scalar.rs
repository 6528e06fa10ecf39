//! Betting on `wr - v` alone, ignoring the importance-weight direction.

use crate::bounds::fan_curvature;
use crate::error::Result;
use crate::kahan::CompensatedSum;
use crate::roots::largest_root_at_threshold;
use crate::types::{Config, Interval, LogSample};
use crate::ConfidenceSequence;

const MAX_BET: f64 = 1.0 - 1e-6;

/// Maximizer over `[0, 1)` of `lambda s + (ln(1 - lambda) + lambda) s2`, the
/// Fan lower bound on log wealth given `s = sum xi` and `s2 = sum xi^2`.
pub fn scalar_bet(sum_xi: f64, sum_xi2: f64) -> f64 {
    if !(sum_xi2 > 0.0) || !(sum_xi > 0.0) {
        return 0.0;
    }
    (sum_xi / (sum_xi + sum_xi2)).clamp(0.0, MAX_BET)
}

/// Rejects low values using the bet `lambda_i >= 0` on `x_i - v`, with
/// `x_i = w_i r_i`. The log-wealth bound at `v` is
/// `(C + Q) - (S + 2T) v + U v^2`.
#[derive(Debug, Clone, Default)]
struct ScalarSide {
    sum_x: CompensatedSum,
    sum_xx: CompensatedSum,
    c: CompensatedSum,
    s: CompensatedSum,
    q: CompensatedSum,
    t: CompensatedSum,
    u: CompensatedSum,
    n: u64,
    bet: f64,
    v_lower: f64,
}

impl ScalarSide {
    fn step(&mut self, x: f64, thresh: f64) {
        let lam = self.bet;
        let g = fan_curvature(lam);
        self.c.add(lam * x);
        self.s.add(lam);
        self.q.add(g * x * x);
        self.t.add(g * x);
        self.u.add(g);
        self.sum_x.add(x);
        self.sum_xx.add(x * x);
        self.n += 1;

        let [q0, q1, q2] = self.bound_coefficients();
        if let Some(root) = largest_root_at_threshold(q0, q1, q2, thresh, Interval::UNIT) {
            self.v_lower = self.v_lower.max(root);
        }
        let v = self.v_lower;
        let n = self.n as f64;
        let sx = self.sum_x.value() - n * v;
        let sxx = self.sum_xx.value() - 2.0 * v * self.sum_x.value() + n * v * v;
        self.bet = scalar_bet(sx, sxx.max(0.0));
    }

    fn bound_coefficients(&self) -> [f64; 3] {
        [
            self.c.value() + self.q.value(),
            -self.s.value() - 2.0 * self.t.value(),
            self.u.value(),
        ]
    }
}

/// Hedged scalar-betting confidence sequence for `V(pi)`.
#[derive(Debug, Clone)]
pub struct ScalarCs {
    cfg: Config,
    thresh: f64,
    plus: ScalarSide,
    minus: ScalarSide,
}

impl ScalarCs {
    pub fn new(cfg: Config) -> Self {
        Self {
            cfg,
            thresh: cfg.log_threshold(2),
            plus: ScalarSide::default(),
            minus: ScalarSide::default(),
        }
    }

    /// Bets to be applied to the next sample by the lower and upper sides.
    pub fn bets(&self) -> (f64, f64) {
        (self.plus.bet, self.minus.bet)
    }

    /// Quadratic log-wealth lower bounds `[q0, q1, q2]` of the lower side in
    /// `v` and of the upper side in `1 - v`.
    pub fn bound_coefficients(&self) -> ([f64; 3], [f64; 3]) {
        (self.plus.bound_coefficients(), self.minus.bound_coefficients())
    }
}

impl ConfidenceSequence for ScalarCs {
    fn push(&mut self, sample: &LogSample) -> Result<Interval> {
        sample.validate(&self.cfg)?;
        self.plus.step(sample.w * sample.r, self.thresh);
        self.minus.step(sample.w * (1.0 - sample.r), self.thresh);
        Ok(self.current())
    }

    fn current(&self) -> Interval {
        Interval::raw(self.plus.v_lower, 1.0 - self.minus.v_lower)
    }

    fn len(&self) -> u64 {
        self.plus.n
    }
}

pub fn scalar_cs<I>(samples: I, cfg: Config) -> Result<Vec<Interval>>
where
    I: IntoIterator,
    I::Item: std::borrow::Borrow<LogSample>,
{
    let mut cs = ScalarCs::new(cfg);
    crate::run_to_vec(&mut cs, samples)
}
