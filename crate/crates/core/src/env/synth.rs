//! A small contextual-bandit world reduced to `(w, r, c)` samples.
//!
//! Each context has a logging policy `h = 0.9 h0 + 0.01` over ten actions,
//! with `h0` uniform on the simplex, so importance weights never exceed 100.
//! The reward is 1 for action 0 and 0 otherwise. The target policy moves
//! `delta` of probability onto action 0 in every context, which makes
//! `V(pi) - V(h) = delta` exactly.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::doubly::control_variate;
use crate::error::{Error, Result};
use crate::types::LogSample;

use super::sampling::stream_rng;

pub const ACTIONS: usize = 10;
pub const SYNTH_W_MAX: f64 = 100.0;
const WORLD_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SynthKind {
    /// Samples carry a control variate from a reward predictor.
    Predictor,
    /// Plain samples; the estimand is `V(pi) - V(h)`.
    Gated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub contexts: usize,
    pub delta: f64,
    /// Predictor strength in `[0, 1]`; 0 gives `c = 0`.
    pub rho: f64,
    /// Predict reward on the wrong actions.
    pub anti_correlated: bool,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            contexts: 100,
            delta: 0.17,
            rho: 0.0,
            anti_correlated: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthEnv {
    pub kind: SynthKind,
    pub params: SynthParams,
    logging: Vec<[f64; ACTIONS]>,
    target: Vec<[f64; ACTIONS]>,
    pub v_pi: f64,
    pub v_h: f64,
}

/// Builds the world from `seed`; samples come from [`SynthEnv::samples`].
pub fn synth_env(kind: SynthKind, params: SynthParams, seed: u64) -> Result<SynthEnv> {
    if params.contexts == 0 {
        return Err(Error::InvalidConfig("need at least one context".into()));
    }
    if !(0.0..=1.0).contains(&params.rho) {
        return Err(Error::InvalidConfig(format!("rho = {} outside [0, 1]", params.rho)));
    }
    let mut rng = stream_rng(seed, WORLD_STREAM);
    let mut logging = Vec::with_capacity(params.contexts);
    let mut target = Vec::with_capacity(params.contexts);
    for _ in 0..params.contexts {
        let mut h = [0.0; ACTIONS];
        for x in h.iter_mut() {
            *x = rng.sample::<f64, _>(Exp1);
        }
        let total: f64 = h.iter().sum();
        for x in h.iter_mut() {
            *x = 0.9 * *x / total + 0.01;
        }
        let p0 = h[0] + params.delta;
        if !(0.0..=1.0).contains(&p0) {
            return Err(Error::InvalidConfig(format!(
                "delta = {} unachievable: a context has h(0) = {:.4}",
                params.delta, h[0]
            )));
        }
        let mut pi = [0.0; ACTIONS];
        pi[0] = p0;
        let rest = (1.0 - p0) / (1.0 - h[0]);
        for a in 1..ACTIONS {
            pi[a] = h[a] * rest;
        }
        logging.push(h);
        target.push(pi);
    }
    let m = params.contexts as f64;
    let v_h = logging.iter().map(|h| h[0]).sum::<f64>() / m;
    let v_pi = target.iter().map(|p| p[0]).sum::<f64>() / m;
    Ok(SynthEnv {
        kind,
        params,
        logging,
        target,
        v_pi,
        v_h,
    })
}

impl SynthEnv {
    /// The estimand: `V(pi)` for the predictor world, `V(pi) - V(h)` for
    /// the gated one.
    pub fn truth(&self) -> f64 {
        match self.kind {
            SynthKind::Predictor => self.v_pi,
            SynthKind::Gated => self.v_pi - self.v_h,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> LogSample {
        let x = rng.random_range(0..self.params.contexts);
        let h = &self.logging[x];
        let pi = &self.target[x];
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut a = ACTIONS - 1;
        for (i, p) in h.iter().enumerate() {
            acc += p;
            if u < acc {
                a = i;
                break;
            }
        }
        let w = pi[a] / h[a];
        let r = if a == 0 { 1.0 } else { 0.0 };
        match self.kind {
            SynthKind::Gated => LogSample::new(w, r),
            SynthKind::Predictor => {
                let rho = self.params.rho;
                let (q_taken, q_bar) = if self.params.anti_correlated {
                    (rho * (1.0 - r), rho * (1.0 - pi[0]))
                } else {
                    (rho * r, rho * pi[0])
                };
                let c = control_variate(w, q_taken, q_bar).expect("q within [0, 1]");
                LogSample::with_cv(w, r, c)
            }
        }
    }

    /// `n` samples determined by `(world, seed, n)`.
    pub fn samples(&self, seed: u64, n: usize) -> Vec<LogSample> {
        let mut rng = stream_rng(seed, 0);
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }
}
