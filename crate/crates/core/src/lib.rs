//! One-class classification with repeated element-wise folding (REF).
//!
//! Training repeatedly standardizes the target-class data and folds it
//! element-wise (by default with `abs`). The trained model is just the
//! sequence of per-dimension `(mean, std)` pairs; a test sample is pushed
//! through the same sequence and accepted as a target when its distance to
//! the origin is at most a threshold `T` (default 1 under L1/D).
//!
//! Besides the classifier the crate carries the evaluation machinery needed
//! to run the usual one-class benchmark protocol: per-class tasks, seeded
//! stratified splits, k-fold threshold selection, Gmean, benchmark reports,
//! and learning curves.

pub mod bench;
pub mod data;
pub mod error;
pub mod eval;
pub mod fold;
pub mod matrix;
pub mod model;
pub mod model_file;
pub mod registry;
pub mod rng;
pub mod select;
pub mod standardize;
pub mod task;

pub use error::{Error, Result};
pub use eval::{gmean, ConfusionCounts, EvalResult};
pub use fold::{DistanceMetric, FoldOp};
pub use matrix::Matrix;
pub use model::{Label, ModelConfig, Prediction, RefModel, DEFAULT_ITERATIONS, DEFAULT_THRESHOLD};
pub use standardize::StandardizerStep;
