//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use betting_ope::ablation::HistoryMode;
use betting_ope::Config;

use crate::error::{HarnessError, Result};
use crate::method::Method;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    /// Run one method over a JSONL log and write its trace.
    Trace,
    Coverage,
    Width,
    Timing,
    Predictor,
    Gated,
    /// Fixed-sample interval from permuted orderings of a batch.
    Ci,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Trace,
        Experiment::Coverage,
        Experiment::Width,
        Experiment::Timing,
        Experiment::Predictor,
        Experiment::Gated,
        Experiment::Ci,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Experiment::Trace => "trace",
            Experiment::Coverage => "coverage",
            Experiment::Width => "width",
            Experiment::Timing => "timing",
            Experiment::Predictor => "predictor",
            Experiment::Gated => "gated",
            Experiment::Ci => "ci",
        }
    }
}

impl FromStr for Experiment {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.id() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown experiment '{s}'")))
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub alpha: f64,
    pub w_max: f64,
    /// Base seed; per-run seeds are derived from it.
    pub seed: u64,
    /// Number of seeded repetitions.
    pub seeds: usize,
    pub samples: usize,
    pub methods: Vec<Method>,
    /// Coverage suite size.
    pub n_envs: usize,
    /// `E[w^2]` of the single environment used by the timing experiment.
    pub second_moment: f64,
    /// `V(pi)` of the single environment used by the timing experiment.
    pub value: f64,
    pub delta: f64,
    pub rho: f64,
    pub anti_correlated: bool,
    pub contexts: usize,
    /// Checkpoints per width curve, log-spaced up to `samples`.
    pub checkpoints: usize,
    /// Trace row stride.
    pub stride: usize,
    pub history: HistoryMode,
    pub grid_eps: f64,
    /// Slower methods are stopped after this multiple of the fastest time.
    pub censor_factor: f64,
    pub permutations: usize,
    pub input: Option<PathBuf>,
    pub output: PathBuf,
}

impl ExperimentConfig {
    /// Desk-scale defaults for `experiment`.
    pub fn defaults(experiment: Experiment) -> Self {
        let base = Self {
            experiment,
            alpha: 0.05,
            w_max: 100.0,
            seed: 1,
            seeds: 10,
            samples: 100_000,
            methods: vec![Method::Mope],
            n_envs: 200,
            second_moment: 50.0,
            value: 0.05,
            delta: 0.17,
            rho: 0.9,
            anti_correlated: false,
            contexts: 100,
            checkpoints: 20,
            stride: 1,
            history: HistoryMode::Aggregated,
            grid_eps: betting_ope::ablation::DEFAULT_EPS,
            censor_factor: 50.0,
            permutations: 1,
            input: None,
            output: PathBuf::from("out"),
        };
        match experiment {
            Experiment::Trace | Experiment::Ci => Self {
                methods: vec![Method::Mope],
                ..base
            },
            Experiment::Coverage => Self {
                samples: 20_000,
                methods: vec![Method::Mope, Method::Scalar],
                ..base
            },
            Experiment::Width => Self {
                methods: vec![Method::Mope, Method::Scalar, Method::Grid, Method::Bound, Method::El],
                ..base
            },
            Experiment::Timing => Self {
                samples: 500_000,
                methods: vec![Method::Mope, Method::Scalar, Method::Grid, Method::Bound],
                ..base
            },
            Experiment::Predictor => Self {
                seeds: 5,
                samples: 20_000,
                methods: vec![Method::Mope, Method::Predictor, Method::Doubly],
                ..base
            },
            Experiment::Gated => Self {
                alpha: 0.01,
                seeds: 5,
                methods: vec![Method::Gated],
                stride: 1000,
                ..base
            },
        }
    }

    /// Reads `path`, then applies `overrides` (each `key=value`).
    pub fn load(
        experiment: Option<Experiment>,
        path: Option<&Path>,
        overrides: &[String],
    ) -> Result<Self> {
        let mut pairs = Vec::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p).map_err(|e| HarnessError::io(p, e))?;
            pairs.extend(parse_pairs(&text)?);
        }
        for o in overrides {
            pairs.push(split_pair(o)?);
        }
        let from_file = pairs
            .iter()
            .rev()
            .find(|(k, _)| k == "experiment")
            .map(|(_, v)| v.parse::<Experiment>())
            .transpose()?;
        let kind = match (experiment, from_file) {
            (Some(e), Some(f)) if e != f => {
                return Err(HarnessError::Config(format!(
                    "subcommand '{e}' conflicts with experiment = {f}"
                )))
            }
            (Some(e), _) => e,
            (None, Some(f)) => f,
            (None, None) => Experiment::Trace,
        };
        let mut cfg = Self::defaults(kind);
        for (k, v) in &pairs {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "experiment" => {
                let e: Experiment = value.parse()?;
                if e != self.experiment {
                    return Err(HarnessError::Config(format!(
                        "experiment = {e} cannot change a '{}' configuration",
                        self.experiment
                    )));
                }
            }
            "alpha" => self.alpha = parse(key, value)?,
            "w_max" => self.w_max = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "seeds" => self.seeds = parse(key, value)?,
            "samples" => self.samples = parse(key, value)?,
            "methods" => {
                self.methods = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            "n_envs" => self.n_envs = parse(key, value)?,
            "second_moment" => self.second_moment = parse(key, value)?,
            "value" => self.value = parse(key, value)?,
            "delta" => self.delta = parse(key, value)?,
            "rho" => self.rho = parse(key, value)?,
            "anti_correlated" => self.anti_correlated = parse(key, value)?,
            "contexts" => self.contexts = parse(key, value)?,
            "checkpoints" => self.checkpoints = parse(key, value)?,
            "stride" => self.stride = parse(key, value)?,
            "history" => {
                self.history = match value {
                    "aggregated" => HistoryMode::Aggregated,
                    "full" => HistoryMode::Full,
                    _ => {
                        return Err(HarnessError::Config(format!(
                            "history must be 'aggregated' or 'full', got '{value}'"
                        )))
                    }
                }
            }
            "grid_eps" => self.grid_eps = parse(key, value)?,
            "censor_factor" => self.censor_factor = parse(key, value)?,
            "permutations" => self.permutations = parse(key, value)?,
            "input" => self.input = Some(PathBuf::from(value)),
            "output" => self.output = PathBuf::from(value),
            _ => return Err(HarnessError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.engine_config()?;
        let counts = [
            ("seeds", self.seeds),
            ("samples", self.samples),
            ("n_envs", self.n_envs),
            ("contexts", self.contexts),
            ("checkpoints", self.checkpoints),
            ("stride", self.stride),
            ("permutations", self.permutations),
        ];
        if let Some((k, _)) = counts.iter().find(|(_, n)| *n == 0) {
            return Err(HarnessError::Config(format!("{k} must be at least 1")));
        }
        if self.methods.is_empty() {
            return Err(HarnessError::Config("methods must list at least one method".into()));
        }
        if !(self.censor_factor >= 1.0) {
            return Err(HarnessError::Config("censor_factor must be at least 1".into()));
        }
        if !(self.grid_eps > 0.0 && self.grid_eps <= 0.5) {
            return Err(HarnessError::Config("grid_eps must lie in (0, 0.5]".into()));
        }
        let allowed = Method::allowed_in(self.experiment);
        if let Some(m) = self.methods.iter().find(|m| !allowed.contains(m)) {
            return Err(HarnessError::Config(format!(
                "method '{m}' is not available in the '{}' experiment",
                self.experiment
            )));
        }
        if matches!(self.experiment, Experiment::Trace) && self.input.is_none() {
            return Err(HarnessError::Config("the trace experiment needs input = <file.jsonl>".into()));
        }
        Ok(())
    }

    pub fn engine_config(&self) -> Result<Config> {
        Config::new(self.alpha, self.w_max).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// The seed of repetition `index`.
    pub fn run_seed(&self, index: usize) -> u64 {
        self.seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(index as u64)
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| HarnessError::Config(format!("cannot parse {key} = '{value}'")))
}

fn split_pair(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| HarnessError::Config(format!("expected key = value, got '{s}'")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(split_pair)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let pairs = parse_pairs("# width run\nseeds = 3\nmethods = mope, el\n\n").unwrap();
        assert_eq!(pairs.len(), 2);
        let dir = std::env::temp_dir().join("betting-ope-config-test.cfg");
        std::fs::write(&dir, "seeds = 3\nmethods = mope, el\n").unwrap();
        let cfg = ExperimentConfig::load(Some(Experiment::Width), Some(&dir), &["seeds=4".into()])
            .unwrap();
        assert_eq!(cfg.seeds, 4);
        assert_eq!(cfg.methods, vec![Method::Mope, Method::El]);
        std::fs::remove_file(dir).ok();
    }

    #[test]
    fn rejects_unknown_keys_and_methods() {
        assert!(ExperimentConfig::load(Some(Experiment::Width), None, &["bogus=1".into()]).is_err());
        assert!(
            ExperimentConfig::load(Some(Experiment::Width), None, &["methods=nope".into()]).is_err()
        );
        assert!(
            ExperimentConfig::load(Some(Experiment::Coverage), None, &["samples=0".into()]).is_err()
        );
    }

    #[test]
    fn subcommand_and_file_must_agree() {
        let r = ExperimentConfig::load(
            Some(Experiment::Width),
            None,
            &["experiment=coverage".into()],
        );
        assert!(matches!(r, Err(HarnessError::Config(_))));
        let cfg = ExperimentConfig::load(None, None, &["experiment=gated".into()]).unwrap();
        assert_eq!(cfg.experiment, Experiment::Gated);
        assert_eq!(cfg.alpha, 0.01);
    }
}
