use crate::error::{Error, Result};
use crate::process::{mirror_sample, ProcessKind};
use crate::qp::argmax_quadratic;
use crate::region::{region, FeasibleRegion, RegionKind};
use crate::stats::SufficientStats;
use crate::types::{Bet, Config, Interval, LogSample};
use crate::ConfidenceSequence;

pub const DEFAULT_EPS: f64 = 0.005;

#[derive(Debug, Clone)]
struct GridPoint {
    v: f64,
    alive: bool,
    log_plus: f64,
    log_minus: f64,
    bet_plus: Bet,
    bet_minus: Bet,
    reg_plus: FeasibleRegion,
    reg_minus: FeasibleRegion,
}

/// Exact hedged wealth tracked separately at every grid value, each with
/// its own bets maximizing the quadratic bound over the per-value region
/// with margin 1/2. A point is eliminated for good once its hedged wealth
/// reaches `1/alpha`.
#[derive(Debug, Clone)]
pub struct GridCs {
    cfg: Config,
    eps: f64,
    points: Vec<GridPoint>,
    stats_plus: SufficientStats,
    stats_minus: SufficientStats,
    log_inv_alpha: f64,
    t: u64,
}

impl GridCs {
    /// Grid `0, eps, 2 eps, ..., 1`.
    pub fn new(cfg: Config, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::domain("grid_cs", format!("eps = {eps} outside (0, 0.5)")));
        }
        let n = (1.0 / eps).round() as usize + 1;
        let values: Vec<f64> = (0..n).map(|i| (i as f64 * eps).min(1.0)).collect();
        Self::from_values(cfg, values, eps)
    }

    /// `n` evenly spaced points covering `[0, 1]`.
    pub fn with_points(cfg: Config, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain("grid_cs", format!("need at least 3 points, got {n}")));
        }
        let eps = 1.0 / (n - 1) as f64;
        let values = (0..n).map(|i| i as f64 * eps).collect();
        Self::from_values(cfg, values, eps)
    }

    fn from_values(cfg: Config, values: Vec<f64>, eps: f64) -> Result<Self> {
        let points = values
            .into_iter()
            .map(|v| {
                Ok(GridPoint {
                    v,
                    alive: true,
                    log_plus: 0.0,
                    log_minus: 0.0,
                    bet_plus: Bet::ZERO,
                    bet_minus: Bet::ZERO,
                    reg_plus: region(RegionKind::Dv { v, m: 0.5 }, &cfg)?,
                    reg_minus: region(RegionKind::Dv { v: 1.0 - v, m: 0.5 }, &cfg)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            cfg,
            eps,
            points,
            stats_plus: SufficientStats::new(),
            stats_minus: SufficientStats::new(),
            log_inv_alpha: -cfg.alpha.ln(),
            t: 0,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn grid_len(&self) -> usize {
        self.points.len()
    }

    pub fn surviving(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().filter(|p| p.alive).map(|p| p.v)
    }

    /// `(v, ln K+(v), ln K-(v))` for every grid value.
    pub fn log_wealth(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.points.iter().map(|p| (p.v, p.log_plus, p.log_minus))
    }
}

impl ConfidenceSequence for GridCs {
    fn push(&mut self, sample: &LogSample) -> Result<Interval> {
        sample.validate(&self.cfg)?;
        let kind = ProcessKind::Plain;
        let out = kind.outcome(sample)?;
        let out_m = kind.outcome(&mirror_sample(sample, kind)?)?;
        self.stats_plus.update(out, Bet::ZERO);
        self.stats_minus.update(out_m, Bet::ZERO);
        self.t += 1;
        // Every grid value keeps betting and accumulating wealth, as if each
        // were an independent test; elimination is only a flag.
        for p in self.points.iter_mut() {
            let vm = 1.0 - p.v;
            let mp = 1.0 + p.bet_plus.lambda1 * out.u1 + p.bet_plus.lambda2 * (out.u2 - p.v);
            let mm = 1.0 + p.bet_minus.lambda1 * out_m.u1 + p.bet_minus.lambda2 * (out_m.u2 - vm);
            p.log_plus += mp.ln();
            p.log_minus += mm.ln();
            if p.alive {
                let hi = p.log_plus.max(p.log_minus);
                let lo = p.log_plus.min(p.log_minus);
                let hedged = hi + (0.5 * (1.0 + (lo - hi).exp())).ln();
                p.alive = hedged < self.log_inv_alpha;
            }
            p.bet_plus = argmax_quadratic(&self.stats_plus.objective_at(p.v), &p.reg_plus).bet;
            p.bet_minus = argmax_quadratic(&self.stats_minus.objective_at(vm), &p.reg_minus).bet;
        }
        Ok(self.current())
    }

    /// Hull of the surviving points widened by the grid step.
    fn current(&self) -> Interval {
        let mut alive = self.surviving();
        match alive.next() {
            None => Interval::raw(1.0, 0.0),
            Some(first) => {
                let last = alive.last().unwrap_or(first);
                Interval::raw((first - self.eps).max(0.0), (last + self.eps).min(1.0))
            }
        }
    }

    fn len(&self) -> u64 {
        self.t
    }
}

pub fn grid_cs<I>(samples: I, cfg: Config, eps: f64) -> Result<Vec<Interval>>
where
    I: IntoIterator,
    I::Item: std::borrow::Borrow<LogSample>,
{
    let mut cs = GridCs::new(cfg, eps)?;
    crate::run_to_vec(&mut cs, samples)
}
