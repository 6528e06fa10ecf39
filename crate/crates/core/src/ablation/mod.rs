//! Ablations of the main betting strategy and the asymptotic baseline.
//!
//! * [`BoundAblationCs`] bets by maximizing exact log wealth in hindsight
//!   over the common region instead of its quadratic lower bound.
//! * [`GridCs`] tracks exact wealth separately for every value on a grid,
//!   with per-value bets.
//! * [`el_asymptotic_ci`] is the empirical-likelihood interval; it is a
//!   pointwise interval, not a confidence sequence.

mod el;
mod ftl;
mod grid;
mod history;
mod logopt;

pub use el::{el_asymptotic_ci, ElInterval};
pub use ftl::{ftl_exact_bet, BoundAblationCs, FtlBettor};
pub use grid::{grid_cs, GridCs, DEFAULT_EPS};
pub use history::{History, HistoryMode, Term};
pub use logopt::maximize_log_wealth;
