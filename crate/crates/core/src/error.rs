use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("argument outside the domain of {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("sample out of range: {0}")]
    SampleOutOfRange(String),

    #[error("sample is missing the control variate required by the predictor process")]
    MissingControlVariate,

    #[error("non-positive wealth multiplier {multiplier} at step {step}")]
    NonPositiveWealth { step: usize, multiplier: f64 },

    #[error("infeasible region: {0}")]
    InfeasibleRegion(String),

    #[error("invalid objective: {0}")]
    InvalidObjective(String),

    #[error("degenerate batch: {0}")]
    DegenerateBatch(String),

    #[error("infeasible moment targets: {0}")]
    InfeasibleMoments(String),

    #[error("solver did not converge: {0}")]
    NoConvergence(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }
}
