//! Fixed-sample intervals from several orderings of one batch.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hedged::HedgedCs;
use crate::process::ProcessKind;
use crate::roots::largest_root_at_threshold;
use crate::types::{Config, Interval, LogSample};
use crate::ConfidenceSequence;

/// The ordering used for permutation `index` of a batch of `len` samples.
pub fn permuted_order(len: usize, seed: u64, index: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(&mut rng);
    order
}

/// Runs the hedged process over `k` seeded orderings of `batch` and rejects
/// `v` where the average log-wealth lower bound reaches `ln(2/alpha)`. The
/// average of the per-ordering wealths is an e-value, and by concavity of the
/// logarithm its log dominates the average bound.
///
/// With `k = 1` this is the final interval of the single pass.
pub fn ci_from_permutations(
    batch: &[LogSample],
    kind: ProcessKind,
    cfg: Config,
    k: usize,
    seed: u64,
) -> Result<Interval> {
    if k == 0 {
        return Err(Error::domain("ci_from_permutations", "k must be at least 1"));
    }
    if batch.is_empty() {
        return Err(Error::DegenerateBatch("empty batch".into()));
    }
    let mut plus = [0.0; 3];
    let mut minus = [0.0; 3];
    let mut single = None;
    for j in 0..k {
        let mut cs = HedgedCs::new(kind, cfg)?;
        for &i in &permuted_order(batch.len(), seed, j as u64) {
            cs.push(&batch[i])?;
        }
        let p = cs.plus().stats().bound_coefficients();
        let m = cs.minus().stats().bound_coefficients();
        for d in 0..3 {
            plus[d] += p[d] / k as f64;
            minus[d] += m[d] / k as f64;
        }
        single = Some(cs.current());
    }
    if k == 1 {
        return Ok(single.expect("one pass ran"));
    }
    let domain = kind.domain();
    let thresh = cfg.log_threshold(2);
    let lo = largest_root_at_threshold(plus[0], plus[1], plus[2], thresh, domain).unwrap_or(domain.lo);
    let lo_mirror =
        largest_root_at_threshold(minus[0], minus[1], minus[2], thresh, domain).unwrap_or(domain.lo);
    Ok(Interval::raw(lo, kind.unmirror(lo_mirror)))
}
