//! One-sided betting processes that only ever raise a lower confidence
//! bound.
//!
//! The skeptic bets `lambda = (lambda1, lambda2)` on the outcome vector
//! `(w - 1, u2 - v)`, where `u2` is `w r` for the plain process, `w r - c` with
//! a reward predictor, and `w r - r` for the gated difference `V(pi) - V(h)`.
//! Upper bounds come from running the same machinery on mirrored samples.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::qp::argmax_quadratic;
use crate::region::{region, FeasibleRegion, RegionKind};
use crate::roots::largest_root_at_threshold;
use crate::stats::SufficientStats;
use crate::types::{Bet, Config, Interval, LogSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcessKind {
    Plain,
    Predictor,
    Gated,
}

/// The outcome pair `(w - 1, u2)`; the bet pays `lambda1 u1 + lambda2 (u2 - v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeVector {
    pub u1: f64,
    pub u2: f64,
}

impl ProcessKind {
    pub fn outcome(&self, s: &LogSample) -> Result<OutcomeVector> {
        let u2 = match self {
            ProcessKind::Plain => s.w * s.r,
            ProcessKind::Predictor => s.w * s.r - s.c.ok_or(Error::MissingControlVariate)?,
            ProcessKind::Gated => s.w * s.r - s.r,
        };
        Ok(OutcomeVector { u1: s.w - 1.0, u2 })
    }

    /// Region of common bets valid for every `v` in the domain.
    pub fn region_kind(&self) -> RegionKind {
        match self {
            ProcessKind::Plain => RegionKind::C,
            ProcessKind::Predictor => RegionKind::Cq,
            ProcessKind::Gated => RegionKind::G,
        }
    }

    /// Range of the estimand.
    pub fn domain(&self) -> Interval {
        match self {
            ProcessKind::Plain | ProcessKind::Predictor => Interval::UNIT,
            ProcessKind::Gated => Interval::SYMMETRIC_UNIT,
        }
    }

    /// Maps a value rejected by the mirrored process back to the original
    /// scale. The mirrored outcome satisfies `u2' - v' = (w - 1) - (u2 - v)`
    /// for the plain and gated processes and `u2' - v' = -(u2 - v)` with a
    /// predictor.
    pub fn unmirror(&self, v_mirrored: f64) -> f64 {
        match self {
            ProcessKind::Plain | ProcessKind::Predictor => 1.0 - v_mirrored,
            ProcessKind::Gated => -v_mirrored,
        }
    }
}

/// The sample seen by the process that bets against high values.
///
/// Rewards become `1 - r`; a predictor `q` becomes `1 - q`, which turns the
/// control variate into `w - 1 - c`.
pub fn mirror_sample(s: &LogSample, kind: ProcessKind) -> Result<LogSample> {
    match kind {
        ProcessKind::Plain | ProcessKind::Gated => Ok(LogSample::new(s.w, 1.0 - s.r)),
        ProcessKind::Predictor => {
            let c = s.c.ok_or(Error::MissingControlVariate)?;
            Ok(LogSample::with_cv(s.w, 1.0 - s.r, s.w - 1.0 - c))
        }
    }
}

/// Chooses the next bet from the statistics seen so far.
pub trait BetRule {
    /// Sees each outcome after it has been folded into the statistics.
    fn observe(&mut self, _out: OutcomeVector) {}

    fn next_bet(&mut self, stats: &SufficientStats, v: f64, region: &FeasibleRegion) -> Bet;
}

/// Maximizes the quadratic log-wealth lower bound at the surviving endpoint.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuadraticBettor;

impl BetRule for QuadraticBettor {
    fn next_bet(&mut self, stats: &SufficientStats, v: f64, region: &FeasibleRegion) -> Bet {
        argmax_quadratic(&stats.objective_at(v), region).bet
    }
}

/// A process rejecting every `v` below `v_lower`.
#[derive(Debug, Clone)]
pub struct OneSidedState<B = QuadraticBettor> {
    kind: ProcessKind,
    cfg: Config,
    stats: SufficientStats,
    bet: Bet,
    v_lower: f64,
    log_threshold: f64,
    region: Arc<FeasibleRegion>,
    bettor: B,
}

impl OneSidedState<QuadraticBettor> {
    /// A process holding `1/ways` of the initial wealth, so values are
    /// rejected once the bound reaches `ln(ways / alpha)`.
    pub fn new(kind: ProcessKind, cfg: Config, ways: u32) -> Result<Self> {
        let reg = Arc::new(region(kind.region_kind(), &cfg)?);
        Ok(Self::with_bettor(kind, cfg, ways, reg, QuadraticBettor))
    }
}

impl<B: BetRule> OneSidedState<B> {
    pub fn with_bettor(
        kind: ProcessKind,
        cfg: Config,
        ways: u32,
        region: Arc<FeasibleRegion>,
        bettor: B,
    ) -> Self {
        Self {
            kind,
            cfg,
            stats: SufficientStats::new(),
            bet: Bet::ZERO,
            v_lower: kind.domain().lo,
            log_threshold: cfg.log_threshold(ways),
            region,
            bettor,
        }
    }

    /// Observes one sample: updates the statistics with the bet in force,
    /// raises `v_lower` to the largest rejected value and picks the next bet.
    pub fn step(&mut self, s: &LogSample) -> Result<f64> {
        s.validate(&self.cfg)?;
        let out = self.kind.outcome(s)?;
        self.stats.update(out, self.bet);
        self.bettor.observe(out);
        let [q0, q1, q2] = self.stats.bound_coefficients();
        if let Some(root) =
            largest_root_at_threshold(q0, q1, q2, self.log_threshold, self.kind.domain())
        {
            self.v_lower = self.v_lower.max(root);
        }
        self.bet = self
            .bettor
            .next_bet(&self.stats, self.v_lower, &self.region);
        Ok(self.v_lower)
    }

    pub fn kind(&self) -> ProcessKind {
        self.kind
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    /// Bet that will be applied to the next sample.
    pub fn bet(&self) -> Bet {
        self.bet
    }

    pub fn v_lower(&self) -> f64 {
        self.v_lower
    }

    pub fn stats(&self) -> &SufficientStats {
        &self.stats
    }

    pub fn region(&self) -> &FeasibleRegion {
        &self.region
    }

    pub fn log_threshold(&self) -> f64 {
        self.log_threshold
    }

    pub fn bettor(&self) -> &B {
        &self.bettor
    }
}
