//! Monte Carlo measurement: experiment configs, the frame simulator,
//! structural operation counting, and result emission.

pub mod config;
pub mod counters;
pub mod emit;
pub mod sim;

pub use config::{CodeSource, ExperimentConfig};
pub use counters::{FrameCounters, IterationCounts, OpCounts};
pub use emit::{csv_string, emit_csv, emit_plotdata, plotdata_string, CSV_HEADER};
pub use sim::{
    attach_ratio, complexity_ratio, count_ops, preflight, run_detector_only, run_experiment,
    run_experiment_streamed, DetectorRow, ExperimentReport, MeanOps, ResultRow,
};
