//! Benchmark harness for conformal Gaussian-process prediction intervals:
//! experiment configuration, orchestration over seeded repetitions, and
//! CSV/JSON result emission. The `gpcp` binary is a thin wrapper over this
//! library; integration tests drive the same entry points.

pub mod config;
pub mod emit;
pub mod runner;

pub use config::{ExperimentConfig, ExperimentOverrides, MethodTag, OutputFormat, ParetoConfig};
pub use emit::{ParetoRow, RunRecord};
pub use runner::{run_benchmark, run_pareto, BenchReport, ParetoReport};
