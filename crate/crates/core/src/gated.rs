//! Confidence sequence for `V(pi) - V(h)` with a deployment gate.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hedged::HedgedCs;
use crate::process::ProcessKind;
use crate::types::{Config, Interval, LogSample};
use crate::ConfidenceSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    /// The lower bound crossed above zero.
    Deploy,
    /// The upper bound fell below zero.
    Discard,
}

#[derive(Debug, Clone)]
pub struct GatedCs {
    inner: HedgedCs,
    decision: Option<(Decision, u64)>,
}

impl GatedCs {
    pub fn new(cfg: Config) -> Result<Self> {
        Ok(Self {
            inner: HedgedCs::new(ProcessKind::Gated, cfg)?,
            decision: None,
        })
    }

    /// The first decision and the 1-based step at which it fired.
    pub fn decision(&self) -> Option<(Decision, u64)> {
        self.decision
    }

    pub fn inner(&self) -> &HedgedCs {
        &self.inner
    }
}

impl ConfidenceSequence for GatedCs {
    fn push(&mut self, sample: &LogSample) -> Result<Interval> {
        let iv = self.inner.push(sample)?;
        if self.decision.is_none() {
            let t = self.inner.len();
            if iv.lo > 0.0 {
                self.decision = Some((Decision::Deploy, t));
            } else if iv.hi < 0.0 {
                self.decision = Some((Decision::Discard, t));
            }
        }
        Ok(iv)
    }

    fn current(&self) -> Interval {
        self.inner.current()
    }

    fn len(&self) -> u64 {
        self.inner.len()
    }
}
