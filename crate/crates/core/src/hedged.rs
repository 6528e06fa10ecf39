//! Two-sided confidence sequences from a pair of one-sided processes.

use std::sync::Arc;

use crate::error::Result;
use crate::process::{mirror_sample, BetRule, OneSidedState, ProcessKind, QuadraticBettor};
use crate::region::region;
use crate::types::{Config, Interval, LogSample};
use crate::ConfidenceSequence;

/// Equal split of the initial wealth between a process rejecting low values
/// and one, fed mirrored samples, rejecting high values.
#[derive(Debug, Clone)]
pub struct HedgedCs<B = QuadraticBettor> {
    plus: OneSidedState<B>,
    minus: OneSidedState<B>,
    t: u64,
}

impl HedgedCs<QuadraticBettor> {
    pub fn new(kind: ProcessKind, cfg: Config) -> Result<Self> {
        Self::with_ways(kind, cfg, 2)
    }

    /// Each side holds `1/ways` of the initial wealth.
    pub fn with_ways(kind: ProcessKind, cfg: Config, ways: u32) -> Result<Self> {
        let reg = Arc::new(region(kind.region_kind(), &cfg)?);
        Ok(Self::from_sides(
            OneSidedState::with_bettor(kind, cfg, ways, reg.clone(), QuadraticBettor),
            OneSidedState::with_bettor(kind, cfg, ways, reg, QuadraticBettor),
        ))
    }
}

impl<B: BetRule> HedgedCs<B> {
    /// Both sides must share a kind; `minus` is fed mirrored samples.
    pub fn from_sides(plus: OneSidedState<B>, minus: OneSidedState<B>) -> Self {
        debug_assert_eq!(plus.kind(), minus.kind());
        Self { plus, minus, t: 0 }
    }

    pub fn kind(&self) -> ProcessKind {
        self.plus.kind()
    }

    pub fn plus(&self) -> &OneSidedState<B> {
        &self.plus
    }

    pub fn minus(&self) -> &OneSidedState<B> {
        &self.minus
    }

    /// Certified log wealth of the hedged pair at `v`, from the quadratic
    /// lower bounds of both sides.
    pub fn log_wealth_lower_bound(&self, v: f64) -> f64 {
        let lp = self.plus.stats().log_wealth_lower_bound(v);
        let lm = self.minus.stats().log_wealth_lower_bound(self.mirror_value(v));
        log_mean_exp(&[lp, lm])
    }

    fn mirror_value(&self, v: f64) -> f64 {
        // Both mirror maps are involutions.
        self.kind().unmirror(v)
    }
}

/// `ln((e^a1 + ... + e^ak) / k)` without overflow.
pub(crate) fn log_mean_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = xs.iter().map(|x| (x - m).exp()).sum();
    m + (s / xs.len() as f64).ln()
}

impl<B: BetRule> ConfidenceSequence for HedgedCs<B> {
    fn push(&mut self, sample: &LogSample) -> Result<Interval> {
        let kind = self.kind();
        sample.validate(self.plus.config())?;
        let mirrored = mirror_sample(sample, kind)?;
        self.plus.step(sample)?;
        self.minus.step(&mirrored)?;
        self.t += 1;
        Ok(self.current())
    }

    fn current(&self) -> Interval {
        Interval::raw(
            self.plus.v_lower(),
            self.kind().unmirror(self.minus.v_lower()),
        )
    }

    fn len(&self) -> u64 {
        self.t
    }
}

/// One interval per sample from the hedged process of `kind`.
pub fn two_sided_cs<I>(samples: I, kind: ProcessKind, cfg: Config) -> Result<Vec<Interval>>
where
    I: IntoIterator,
    I::Item: std::borrow::Borrow<LogSample>,
{
    let mut cs = HedgedCs::new(kind, cfg)?;
    crate::run_to_vec(&mut cs, samples)
}
