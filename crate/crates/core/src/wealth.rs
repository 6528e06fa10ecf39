//! Exact wealth of a recorded betting sequence; diagnostic ground truth for
//! the quadratic lower bound.

use crate::error::{Error, Result};
use crate::process::ProcessKind;
use crate::types::{Bet, LogSample};

/// `sum_i ln(1 + lambda_i . b_i(v))` where `bets[i]` was placed before
/// `samples[i]` was revealed.
pub fn exact_log_wealth(bets: &[Bet], samples: &[LogSample], v: f64, kind: ProcessKind) -> Result<f64> {
    if bets.len() != samples.len() {
        return Err(Error::domain(
            "exact_log_wealth",
            format!("{} bets for {} samples", bets.len(), samples.len()),
        ));
    }
    let mut total = 0.0;
    for (i, (bet, s)) in bets.iter().zip(samples).enumerate() {
        let out = kind.outcome(s)?;
        let m = 1.0 + bet.lambda1 * out.u1 + bet.lambda2 * (out.u2 - v);
        if !(m > 0.0) {
            return Err(Error::NonPositiveWealth {
                step: i,
                multiplier: m,
            });
        }
        total += m.ln();
    }
    Ok(total)
}
