//! Seeded synthetic environments.

mod maxent;
mod sampling;
mod simplex;
mod suite;
mod synth;

pub use maxent::{maxent_fit, MaxEntDistribution, MaxEntSpec, Moment};
pub use sampling::{sample_stream, stream_rng, Sampler};
pub use simplex::{maximize as lp_maximize, LpOutcome};
pub use suite::{env_suite, SuiteEnv, SuiteKind};
pub use synth::{synth_env, SynthEnv, SynthKind, SynthParams, ACTIONS, SYNTH_W_MAX};
