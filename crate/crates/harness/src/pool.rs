use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{HarnessError, Result};

/// Overrides the worker count; unset or 0 uses every available core.
pub const WORKERS_ENV: &str = "BETTING_OPE_WORKERS";

pub fn worker_count() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            HarnessError::Config(format!("{WORKERS_ENV} must be a non-negative integer, got '{v}'"))
        }),
        Err(_) => Ok(0),
    }
}

pub fn worker_pool() -> Result<ThreadPool> {
    ThreadPoolBuilder::new()
        .num_threads(worker_count()?)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))
}
