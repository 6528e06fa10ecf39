//! Log ingestion, trace output and seeded experiment runners for the
//! `betting-ope` confidence sequences.

mod config;
mod error;
mod experiments;
mod ingest;
mod method;
mod pool;
mod report;
mod trace;

pub use config::{parse_pairs, Experiment, ExperimentConfig};
pub use error::{HarnessError, Result};
pub use experiments::{checkpoints, run_experiment, run_method, timed_run, Timed};
pub use ingest::ingest_jsonl;
pub use method::Method;
pub use pool::{worker_count, worker_pool, WORKERS_ENV};
pub use report::{CsvOut, OutputFile, Report};
pub use trace::{emit_trace, read_trace, trace_rows, write_trace_rows, TraceRow};
