use std::sync::Arc;

use crate::error::Result;
use crate::hedged::HedgedCs;
use crate::process::{BetRule, OneSidedState, OutcomeVector, ProcessKind, QuadraticBettor};
use crate::region::{region, FeasibleRegion};
use crate::stats::SufficientStats;
use crate::types::{Bet, Config, Interval, LogSample};
use crate::ConfidenceSequence;

use super::history::{History, HistoryMode};
use super::logopt::maximize_log_wealth;

/// Follow-the-leader bet: the maximizer over `reg` of the exact log wealth
/// the history would have earned at `v`.
pub fn ftl_exact_bet(hist: &History, v: f64, reg: &FeasibleRegion, mode: HistoryMode) -> Result<Bet> {
    if hist.is_empty() {
        return Ok(Bet::ZERO);
    }
    let (x, _) = maximize_log_wealth(hist.terms(mode), v, reg, None)?;
    Ok(x.into())
}

/// Bets by [`ftl_exact_bet`]; falls back to the quadratic-bound bet if the
/// solver fails.
#[derive(Debug, Clone, Default)]
pub struct FtlBettor {
    history: History,
    mode: HistoryMode,
    fallbacks: u64,
}

impl FtlBettor {
    pub fn new(mode: HistoryMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    /// Number of steps that used the fallback bet.
    pub fn fallbacks(&self) -> u64 {
        self.fallbacks
    }
}

impl BetRule for FtlBettor {
    fn observe(&mut self, out: OutcomeVector) {
        self.history.push(out);
    }

    fn next_bet(&mut self, stats: &SufficientStats, v: f64, region: &FeasibleRegion) -> Bet {
        match ftl_exact_bet(&self.history, v, region, self.mode) {
            Ok(b) => b,
            Err(_) => {
                self.fallbacks += 1;
                QuadraticBettor.next_bet(stats, v, region)
            }
        }
    }
}

/// The hedged process with follow-the-leader bets over the common region.
/// Values are still eliminated through the quadratic lower bound, which
/// holds for any bet sequence inside that region.
#[derive(Debug, Clone)]
pub struct BoundAblationCs {
    inner: HedgedCs<FtlBettor>,
}

impl BoundAblationCs {
    pub fn new(kind: ProcessKind, cfg: Config, mode: HistoryMode) -> Result<Self> {
        let reg = Arc::new(region(kind.region_kind(), &cfg)?);
        let side = |r: Arc<FeasibleRegion>| {
            OneSidedState::with_bettor(kind, cfg, 2, r, FtlBettor::new(mode))
        };
        Ok(Self {
            inner: HedgedCs::from_sides(side(reg.clone()), side(reg)),
        })
    }

    pub fn inner(&self) -> &HedgedCs<FtlBettor> {
        &self.inner
    }

    /// Quadratic-bound bets used for `v` by either side when the exact solver failed.
    pub fn fallbacks(&self) -> u64 {
        self.inner.plus().bettor().fallbacks() + self.inner.minus().bettor().fallbacks()
    }
}

impl ConfidenceSequence for BoundAblationCs {
    fn push(&mut self, sample: &LogSample) -> Result<Interval> {
        self.inner.push(sample)
    }

    fn current(&self) -> Interval {
        self.inner.current()
    }

    fn len(&self) -> u64 {
        self.inner.len()
    }
}
