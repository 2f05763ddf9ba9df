//! Experiment orchestration behind the command-line tool: sampling runs,
//! exact verification, mixing trajectories and benchmarks.

mod commands;
mod config;
pub mod stats;

pub use commands::{
    cmd_bench, cmd_mixing, cmd_sample, cmd_verify, ratio_study, render_json, BenchReport,
    DistanceCheck, MixingReport, MixingRow, RatioRow, SampleOutput, SampleSummary,
    VerificationReport,
};
pub use config::{ExperimentConfig, OutputFormat};
