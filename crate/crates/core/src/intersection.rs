//! Running intersection of a sequence of intervals.

use serde::{Deserialize, Serialize};

use crate::types::Interval;

/// Cumulative intersection. Once the inputs become disjoint the stored
/// interval has `lo > hi`, which [`Interval::is_empty`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunningIntersection {
    current: Option<Interval>,
}

impl RunningIntersection {
    pub fn new() -> Self {
        Self { current: None }
    }

    pub fn push(&mut self, next: Interval) -> Interval {
        let cur = match self.current {
            Some(c) => c.intersect(&next),
            None => next,
        };
        self.current = Some(cur);
        cur
    }

    pub fn current(&self) -> Option<Interval> {
        self.current
    }

    pub fn is_empty(&self) -> bool {
        self.current.is_some_and(|c| c.is_empty())
    }
}

impl Default for RunningIntersection {
    fn default() -> Self {
        Self::new()
    }
}

pub fn running_intersection<I: IntoIterator<Item = Interval>>(intervals: I) -> Vec<Interval> {
    let mut acc = RunningIntersection::new();
    intervals.into_iter().map(|i| acc.push(i)).collect()
}
