use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::maxent::{maxent_fit, MaxEntDistribution, MaxEntSpec};
use super::sampling::stream_rng;

/// Stream reserved for drawing environment parameters.
const PARAMETER_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SuiteKind {
    /// `n_envs` environments with `E[w^2] = 10` and `V(pi)` uniform on `[0, 1]`.
    Coverage { n_envs: usize },
    /// `(V(pi), E[w^2])` in `{0.05, 0.5} x {10, 50}`.
    Width,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEnv {
    pub name: String,
    pub spec: MaxEntSpec,
    pub dist: MaxEntDistribution,
    pub truth: f64,
}

pub fn env_suite(kind: SuiteKind, seed: u64) -> Result<Vec<SuiteEnv>> {
    let params: Vec<(f64, f64)> = match kind {
        SuiteKind::Coverage { n_envs } => {
            let mut rng = stream_rng(seed, PARAMETER_STREAM);
            (0..n_envs).map(|_| (10.0, rng.random::<f64>())).collect()
        }
        SuiteKind::Width => vec![(10.0, 0.05), (10.0, 0.5), (50.0, 0.05), (50.0, 0.5)],
    };
    params
        .into_iter()
        .map(|(m2, v)| {
            let spec = MaxEntSpec::standard(m2, v);
            let dist = maxent_fit(&spec)?;
            Ok(SuiteEnv {
                name: format!("m2={m2},v={v}"),
                truth: dist.value(),
                spec,
                dist,
            })
        })
        .collect()
}
