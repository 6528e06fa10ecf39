use std::collections::HashMap;

use crate::process::OutcomeVector;

/// Outcome `(u1, u2)` seen `count` times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub u1: f64,
    pub u2: f64,
    pub count: f64,
}

/// How the exact objective is evaluated over the history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HistoryMode {
    /// One term per distinct outcome. Identical optimum, much cheaper when
    /// outcomes repeat.
    #[default]
    Aggregated,
    /// One term per sample.
    Full,
}

/// Append-only record of every outcome, kept both in order and as a
/// multiset of distinct outcomes.
#[derive(Debug, Clone, Default)]
pub struct History {
    full: Vec<Term>,
    distinct: Vec<Term>,
    index: HashMap<(u64, u64), usize>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, out: OutcomeVector) {
        let term = Term {
            u1: out.u1,
            u2: out.u2,
            count: 1.0,
        };
        self.full.push(term);
        let key = (out.u1.to_bits(), out.u2.to_bits());
        match self.index.get(&key) {
            Some(&i) => self.distinct[i].count += 1.0,
            None => {
                self.index.insert(key, self.distinct.len());
                self.distinct.push(term);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.full.len()
    }

    pub fn is_empty(&self) -> bool {
        self.full.is_empty()
    }

    pub fn terms(&self, mode: HistoryMode) -> &[Term] {
        match mode {
            HistoryMode::Aggregated => &self.distinct,
            HistoryMode::Full => &self.full,
        }
    }
}
