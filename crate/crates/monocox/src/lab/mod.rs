//! Monte Carlo laboratory: data generators satisfying the support and
//! moment conditions, the limit-law sampler, the scaling constants of the
//! pointwise limit theorems, and the experiment runner.
//!
//! Randomness is organized around one root seed with per-task substreams of
//! a counter-based generator (ChaCha8), so results are reproducible bit for
//! bit and independent of thread scheduling:
//!
//! * stream `0`: plain sample generation;
//! * stream `PHI_STREAM | chunk`: risk-mass Monte Carlo chunks;
//! * stream `CHERNOFF_STREAM | rep`: one limit-law draw per replicate;
//! * stream `((n_index + 1) << 32) | rep`: one experiment replicate.

mod chernoff;
mod generator;
mod runner;
mod scaling;
pub mod stats;

pub use chernoff::{chernoff_sample, chernoff_sample_sequential, ChernoffSample};
pub use generator::{generate, Baseline, CovariateLaw, GeneratorSpec};
pub use runner::{
    run_experiment, run_experiment_sequential, EstimatorChoice, ExperimentReport, ExperimentSpec,
    NSummary, RateRatio, ReplicateRow,
};
pub use scaling::{phi_true, scaling_constant, scaling_constant_with_reps, PhiEstimate, ScalingComponents, ScalingConstant};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LabError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("theorem conditions violated: {0}")]
    TheoremConditionsViolated(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("estimation failed in replicate: {0}")]
    Estimation(String),
}

pub(crate) const PHI_STREAM: u64 = 1 << 48;
pub(crate) const CHERNOFF_STREAM: u64 = 1 << 49;

pub(crate) fn replicate_stream(n_index: usize, rep: usize) -> u64 {
    ((n_index as u64 + 1) << 32) | rep as u64
}

/// Map `f` over `0..count`, in parallel when the `parallel` feature is on.
/// Output order is by index, so results do not depend on scheduling.
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match pool() {
            Some(p) => p.install(|| (0..count).into_par_iter().map(&f).collect()),
            None => (0..count).into_par_iter().map(f).collect(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indexed_seq(count, f)
    }
}

/// Always-sequential twin of [`map_indexed`], kept for benchmarks and for
/// checking that parallel and sequential runs agree bitwise.
pub(crate) fn map_indexed_seq<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}

/// Worker cap from `MONOCOX_THREADS`; `None` means rayon's default.
pub fn thread_cap() -> Option<usize> {
    std::env::var("MONOCOX_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&k| k >= 1)
}

#[cfg(feature = "parallel")]
fn pool() -> Option<&'static rayon::ThreadPool> {
    use std::sync::OnceLock;
    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        thread_cap().map(|k| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .expect("worker pool")
        })
    })
    .as_ref()
}
