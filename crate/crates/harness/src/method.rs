use std::fmt;
use std::str::FromStr;

use betting_ope::ablation::{BoundAblationCs, GridCs, HistoryMode};
use betting_ope::{
    Config, ConfidenceSequence, DoublyHedgedCs, GatedCs, HedgedCs, ProcessKind, ScalarCs,
};

use crate::config::Experiment;
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Hedged vector betting with common bets.
    Mope,
    /// Betting on `wr - v` only.
    Scalar,
    /// Per-value bets on a grid.
    Grid,
    /// Exact follow-the-leader bets, certified through the quadratic bound.
    Bound,
    /// Asymptotic empirical likelihood; pointwise only.
    El,
    /// Hedged vector betting on `wr - c`.
    Predictor,
    Doubly,
    Gated,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Mope,
        Method::Scalar,
        Method::Grid,
        Method::Bound,
        Method::El,
        Method::Predictor,
        Method::Doubly,
        Method::Gated,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Method::Mope => "mope",
            Method::Scalar => "scalar",
            Method::Grid => "grid",
            Method::Bound => "bound",
            Method::El => "el",
            Method::Predictor => "predictor",
            Method::Doubly => "doubly",
            Method::Gated => "gated",
        }
    }

    /// Name used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            Method::Mope => "MOPE",
            Method::Scalar => "-Vector",
            Method::Grid => "-Common",
            Method::Bound => "-Bound",
            Method::El => "EL (pointwise only)",
            Method::Predictor => "MOPE+predictor",
            Method::Doubly => "doubly hedged",
            Method::Gated => "gated",
        }
    }

    pub fn is_streaming(&self) -> bool {
        !matches!(self, Method::El)
    }

    pub fn allowed_in(e: Experiment) -> &'static [Method] {
        use Method::*;
        match e {
            Experiment::Trace => &[Mope, Scalar, Grid, Bound, Predictor, Doubly, Gated],
            Experiment::Coverage | Experiment::Timing => &[Mope, Scalar, Grid, Bound],
            Experiment::Width => &[Mope, Scalar, Grid, Bound, El],
            Experiment::Predictor => &[Mope, Predictor, Doubly],
            Experiment::Gated => &[Gated],
            Experiment::Ci => &[Mope, El],
        }
    }

    /// A fresh streaming engine.
    pub fn engine(
        &self,
        cfg: Config,
        history: HistoryMode,
        grid_eps: f64,
    ) -> Result<Box<dyn ConfidenceSequence + Send>> {
        Ok(match self {
            Method::Mope => Box::new(HedgedCs::new(ProcessKind::Plain, cfg)?),
            Method::Scalar => Box::new(ScalarCs::new(cfg)),
            Method::Grid => Box::new(GridCs::new(cfg, grid_eps)?),
            Method::Bound => Box::new(BoundAblationCs::new(ProcessKind::Plain, cfg, history)?),
            Method::Predictor => Box::new(HedgedCs::new(ProcessKind::Predictor, cfg)?),
            Method::Doubly => Box::new(DoublyHedgedCs::new(cfg)?),
            Method::Gated => Box::new(GatedCs::new(cfg)?),
            Method::El => {
                return Err(HarnessError::Config(
                    "el is a batch interval, not a confidence sequence".into(),
                ))
            }
        })
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown method '{s}'")))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}
