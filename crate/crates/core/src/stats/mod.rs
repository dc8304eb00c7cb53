//! Rendering benchmarks and bootstrap effect sizes.

mod bench;
mod bootstrap;

pub use bench::{bench_render, environment_note, BenchReport, TypeTimings, DEFAULT_ITERATIONS};
pub use bootstrap::{bootstrap_diff, bootstrap_diff_level, BootstrapResult, CiMethod, DEFAULT_CONFIDENCE, DEFAULT_RESAMPLES};
