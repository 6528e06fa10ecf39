use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::env::{lp_maximize, LpOutcome};
use crate::error::{Error, Result};
use crate::process::ProcessKind;
use crate::region::{region, RegionKind};
use crate::types::{Config, Interval, LogSample};

use super::history::{History, HistoryMode, Term};
use super::logopt::maximize_log_wealth;

const BISECT_TOL: f64 = 1e-6;

/// Asymptotic empirical-likelihood interval. Valid only pointwise at a
/// fixed sample size; it is not a confidence sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElInterval {
    pub interval: Interval,
    /// Maximum-likelihood estimate of `V(pi)`.
    pub estimate: f64,
    pub pointwise_only: bool,
}

/// `{v : 2 (B(v) - L1) <= chi2_1(1 - alpha)}` where `B(v)` is the dual
/// profile log likelihood over bets keeping every multiplier non-negative
/// and `L1` its value with only `w - 1` constrained.
pub fn el_asymptotic_ci(batch: &[LogSample], cfg: Config) -> Result<ElInterval> {
    if batch.is_empty() {
        return Err(Error::DegenerateBatch("empty batch".into()));
    }
    if batch.iter().all(|s| s.w == 0.0) {
        return Err(Error::DegenerateBatch("every importance weight is zero".into()));
    }
    let mut hist = History::new();
    for s in batch {
        s.validate(&cfg)?;
        hist.push(ProcessKind::Plain.outcome(s)?);
    }
    let terms = hist.terms(HistoryMode::Aggregated);
    let lam1 = lambda1_mle(terms, cfg.w_excess());
    let l1: f64 = terms.iter().map(|t| t.count * (1.0 + lam1 * t.u1).ln()).sum();
    let n = batch.len() as f64;
    // Q_i = 1 / (n (1 + lam1 (w_i - 1))) is the MLE; its mean of wr is the estimate.
    let estimate = (terms
        .iter()
        .map(|t| t.count * t.u2 / (1.0 + lam1 * t.u1))
        .sum::<f64>()
        / n)
        .clamp(0.0, 1.0);

    let crit = ChiSquared::new(1.0)
        .map_err(|e| Error::domain("el_asymptotic_ci", e.to_string()))?
        .inverse_cdf(1.0 - cfg.alpha);
    // Outside the values attainable by reweighting the sample the profile
    // likelihood is zero and the dual diverges.
    let (v_min, v_max) = attainable_values(terms)?;
    let rejects = |v: f64| -> Result<bool> {
        if v <= v_min || v >= v_max {
            return Ok(true);
        }
        let reg = region(RegionKind::Dv { v, m: 0.0 }, &cfg)?;
        match maximize_log_wealth(terms, v, &reg, None) {
            Ok((_, b)) => Ok(2.0 * (b - l1) > crit),
            // Only near the edge of the attainable range, where B(v) is huge.
            Err(Error::NoConvergence(_)) => Ok(true),
            Err(e) => Err(e),
        }
    };

    let lo = if rejects(0.0)? { bisect(&rejects, 0.0, estimate)? } else { 0.0 };
    let hi = if rejects(1.0)? { bisect(&rejects, 1.0, estimate)? } else { 1.0 };
    Ok(ElInterval {
        interval: Interval::raw(lo, hi),
        estimate,
        pointwise_only: true,
    })
}

/// Range of `sum q_i w_i r_i` over probability vectors `q` on the distinct
/// outcomes with `sum q_i w_i = 1`.
fn attainable_values(terms: &[Term]) -> Result<(f64, f64)> {
    let a = vec![vec![1.0; terms.len()], terms.iter().map(|t| t.u1 + 1.0).collect()];
    let b = [1.0, 1.0];
    let f: Vec<f64> = terms.iter().map(|t| t.u2).collect();
    let neg: Vec<f64> = f.iter().map(|x| -x).collect();
    match (lp_maximize(&f, &a, &b), lp_maximize(&neg, &a, &b)) {
        (LpOutcome::Optimal { value: hi, .. }, LpOutcome::Optimal { value: lo, .. }) => Ok((-lo, hi)),
        _ => Err(Error::DegenerateBatch(
            "no reweighting of the sample has mean importance weight 1".into(),
        )),
    }
}

/// Boundary between a rejected `out` and an accepted `inside`.
fn bisect(rejects: &dyn Fn(f64) -> Result<bool>, mut out: f64, mut inside: f64) -> Result<f64> {
    while (out - inside).abs() > BISECT_TOL {
        let mid = 0.5 * (out + inside);
        if rejects(mid)? {
            out = mid;
        } else {
            inside = mid;
        }
    }
    Ok(inside)
}

/// Maximizer of `sum ln(1 + l (w_i - 1))` over `[-1/W, 1]`.
fn lambda1_mle(terms: &[Term], w_excess: f64) -> f64 {
    let deriv = |l: f64| -> f64 {
        terms
            .iter()
            .map(|t| t.count * t.u1 / (1.0 + l * t.u1))
            .sum()
    };
    if terms.iter().all(|t| t.u1 == 0.0) {
        return 0.0;
    }
    let mut lo = if w_excess > 0.0 { -1.0 / w_excess } else { -1e6 };
    let mut hi = 1.0;
    // The derivative decreases; endpoints where a term vanishes give +-inf.
    if deriv(hi) >= 0.0 {
        return hi;
    }
    if deriv(lo) <= 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if deriv(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}
