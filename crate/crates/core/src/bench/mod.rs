//! Benchmark runner: one-class tasks over seeded splits, Gmean tables,
//! learning curves and a training-time probe.
//!
//! Every task x repetition cell derives its own seed from the master seed
//! and the task name, so cells can run in any order on any number of threads.

mod curve;
mod probe;
mod report;
mod run;
mod spec;

pub use curve::{all_curves, learning_curve, AverageCurve, LearningCurve};
pub use probe::{render_probe, synthetic_normal, timing_probe, ProbeRow, PROBE_RUNS};
pub use report::{
    deterministic_part, mean_std, BenchReport, Classifier, RunRecord, TaskSummary, AVERAGE_ROW,
};
pub use run::{run_benchmark, run_benchmark_on, task_seed, BenchContext};
pub use spec::{BenchInput, BenchSpec, DatasetRef, FileDataset, ThresholdMode, DEFAULT_SEED};

/// Version of the report, curve and probe text formats.
pub const FORMAT_VERSION: u32 = 1;
