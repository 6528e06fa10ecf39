//! Hedging between the processes with and without a reward predictor.

use crate::error::{Error, Result};
use crate::hedged::{log_mean_exp, HedgedCs};
use crate::process::ProcessKind;
use crate::types::{Config, Interval, LogSample};
use crate::ConfidenceSequence;

/// Zero-mean control variate `w q(a) - sum_a' pi(a') q(a')` from the
/// predicted reward of the logged action and its expectation under the
/// target policy.
pub fn control_variate(w: f64, q_taken: f64, q_bar: f64) -> Result<f64> {
    if !(w >= 0.0 && w.is_finite()) {
        return Err(Error::domain("control_variate", format!("w = {w} must be finite and >= 0")));
    }
    for (name, q) in [("q_taken", q_taken), ("q_bar", q_bar)] {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::domain("control_variate", format!("{name} = {q} outside [0, 1]")));
        }
    }
    Ok(w * q_taken - q_bar)
}

/// Four one-sided processes, each holding a quarter of the initial wealth:
/// lower and upper sides, with and without the control variate.
#[derive(Debug, Clone)]
pub struct DoublyHedgedCs {
    plain: HedgedCs,
    predictor: HedgedCs,
}

impl DoublyHedgedCs {
    pub fn new(cfg: Config) -> Result<Self> {
        Ok(Self {
            plain: HedgedCs::with_ways(ProcessKind::Plain, cfg, 4)?,
            predictor: HedgedCs::with_ways(ProcessKind::Predictor, cfg, 4)?,
        })
    }

    pub fn plain(&self) -> &HedgedCs {
        &self.plain
    }

    pub fn predictor(&self) -> &HedgedCs {
        &self.predictor
    }

    /// Certified log wealth of the combined process at `v`.
    pub fn log_wealth_lower_bound(&self, v: f64) -> f64 {
        log_mean_exp(&[
            self.plain.log_wealth_lower_bound(v),
            self.predictor.log_wealth_lower_bound(v),
        ])
    }
}

impl ConfidenceSequence for DoublyHedgedCs {
    fn push(&mut self, sample: &LogSample) -> Result<Interval> {
        if sample.c.is_none() {
            return Err(Error::MissingControlVariate);
        }
        sample.validate(self.plain.plus().config())?;
        self.plain.push(sample)?;
        self.predictor.push(sample)?;
        Ok(self.current())
    }

    /// A value is rejected once any of the four processes rejects it.
    fn current(&self) -> Interval {
        self.plain.current().intersect(&self.predictor.current())
    }

    fn len(&self) -> u64 {
        self.plain.len()
    }
}
