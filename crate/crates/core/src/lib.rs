//! Anytime-valid confidence sequences for off-policy evaluation of
//! contextual-bandit policies.
//!
//! Logged interactions are reduced to an importance weight `w`, a reward `r`
//! and optionally a control variate `c`. A skeptic bets against each candidate
//! value `v` of the target policy's value; values whose wealth crosses the
//! Ville threshold are rejected forever. Wealth is never tabulated per `v`:
//! a quadratic lower bound on log wealth is maintained through a handful of
//! running sums, so every step costs O(1) regardless of the stream length.
//!
//! The main entry points are:
//!
//! * [`HedgedCs`]: the two-sided vector-betting confidence sequence
//!   (plain, reward-predictor and gated variants),
//! * [`ScalarCs`]: betting only on `wr - v`,
//! * [`DoublyHedgedCs`]: hedging between runs with and without a predictor,
//! * [`GatedCs`]: a confidence sequence for `V(pi) - V(h)` with deploy/discard
//!   decisions,
//! * [`ci_from_permutations`]: a fixed-sample interval averaging the wealth
//!   of several orderings,
//! * the [`ablation`] module with the exact follow-the-leader and per-`v` grid
//!   variants plus the asymptotic empirical-likelihood interval,
//! * the [`env`] module with seeded synthetic environments.

pub mod ablation;
pub mod bounds;
mod doubly;
pub mod env;
mod error;
mod gated;
mod hedged;
mod intersection;
mod kahan;
mod permutation;
pub mod process;
pub mod qp;
pub mod region;
pub mod roots;
mod scalar;
pub mod stats;
mod types;
pub mod wealth;

pub use doubly::{control_variate, DoublyHedgedCs};
pub use error::{Error, Result};
pub use gated::{Decision, GatedCs};
pub use hedged::{two_sided_cs, HedgedCs};
pub use intersection::{running_intersection, RunningIntersection};
pub use permutation::{ci_from_permutations, permuted_order};
pub use process::{mirror_sample, BetRule, OneSidedState, OutcomeVector, ProcessKind, QuadraticBettor};
pub use qp::{argmax_quadratic, QpSolution, QuadObjective};
pub use region::{region, FeasibleRegion, HalfPlane, RegionKind};
pub use scalar::{scalar_bet, scalar_cs, ScalarCs};
pub use stats::SufficientStats;
pub use types::{Bet, Config, Interval, LogSample};
pub use wealth::exact_log_wealth;

/// A streaming confidence sequence: one interval per observed sample.
pub trait ConfidenceSequence {
    /// Consumes one sample and returns the interval after observing it.
    fn push(&mut self, sample: &LogSample) -> Result<Interval>;

    /// The interval implied by the data seen so far.
    fn current(&self) -> Interval;

    /// Number of samples consumed.
    fn len(&self) -> u64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Runs `engine` over `samples`, collecting every emitted interval.
pub fn run_to_vec<E, I>(engine: &mut E, samples: I) -> Result<Vec<Interval>>
where
    E: ConfidenceSequence + ?Sized,
    I: IntoIterator,
    I::Item: std::borrow::Borrow<LogSample>,
{
    use std::borrow::Borrow;
    samples
        .into_iter()
        .map(|s| engine.push(s.borrow()))
        .collect()
}
