use std::time::Instant;

use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::eval::{gmean, ConfusionCounts};
use crate::model::{ModelConfig, RefModel};
use crate::registry::Registry;
use crate::rng::{derive_seed, fnv1a, mix64, ALGORITHM};
use crate::select::{select_threshold, ThresholdGrid};
use crate::task::{make_occ_tasks, make_split_plan, OccTask, Split};

use super::report::{BenchReport, Classifier, RunRecord};
use super::spec::{BenchInput, BenchSpec, ThresholdMode};

/// Where datasets come from and how many worker threads to use.
#[derive(Clone, Debug)]
pub struct BenchContext {
    pub registry: Registry,
    pub jobs: usize,
}

/// Seed of a task's split plan: the master seed mixed with a hash of the task name.
pub fn task_seed(master: u64, task: &str) -> u64 {
    mix64(master ^ fnv1a(task.as_bytes()))
}

/// Seed for threshold selection inside one repetition.
fn selection_seed(split_seed: u64) -> u64 {
    mix64(split_seed ^ 0x5E1E_C7ED_5E1E_C7ED)
}

/// A task with everything needed to run its repetitions.
pub(crate) struct PreparedTask<'a> {
    pub dataset: &'a Dataset,
    pub task: OccTask,
    pub splits: Vec<Split>,
    pub split_seeds: Vec<u64>,
    pub is_target: Vec<bool>,
}

pub(crate) fn prepare<'a>(
    spec: &BenchSpec,
    inputs: &'a [BenchInput],
) -> Result<Vec<PreparedTask<'a>>> {
    let mut out = Vec::new();
    for input in inputs {
        let ds = &input.dataset;
        for task in make_occ_tasks(ds)? {
            let seed = task_seed(spec.seed, &task.name);
            let plan = make_split_plan(ds, &task, spec.train_fraction, spec.repetitions, seed)?;
            let split_seeds = (0..spec.repetitions as u64)
                .map(|r| derive_seed(seed, r))
                .collect();
            let is_target = task.target_mask(ds);
            out.push(PreparedTask {
                dataset: ds,
                task,
                splits: plan.splits,
                split_seeds,
                is_target,
            });
        }
    }
    let mut names: Vec<&str> = out.iter().map(|t| t.task.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Config(format!("duplicate task name '{}'", w[0])));
    }
    Ok(out)
}

impl PreparedTask<'_> {
    /// Training targets of repetition `r` (0-based).
    pub fn train_targets(&self, r: usize) -> Vec<usize> {
        self.splits[r]
            .train
            .iter()
            .copied()
            .filter(|&i| self.is_target[i])
            .collect()
    }
}

/// Loads the spec's datasets through the registry and runs them.
pub fn run_benchmark(spec: &BenchSpec, ctx: &BenchContext) -> Result<BenchReport> {
    spec.validate()?;
    let inputs = spec.resolve(&ctx.registry)?;
    run_benchmark_on(spec, &inputs, ctx.jobs)
}

/// Runs every task x repetition cell of `spec` over already loaded datasets.
///
/// Cells run in parallel on `jobs` threads; results are assembled in task
/// order, so the deterministic part of the report does not depend on `jobs`.
pub fn run_benchmark_on(
    spec: &BenchSpec,
    inputs: &[BenchInput],
    jobs: usize,
) -> Result<BenchReport> {
    spec.validate()?;
    let tasks = prepare(spec, inputs)?;
    let cells: Vec<(usize, usize)> = (0..tasks.len())
        .flat_map(|t| (0..spec.repetitions).map(move |r| (t, r)))
        .collect();

    let results: Vec<Result<Vec<RunRecord>>> = with_pool(jobs, || {
        cells
            .par_iter()
            .map(|&(t, r)| run_cell(spec, &tasks[t], r))
            .collect()
    })?;
    let mut runs = Vec::with_capacity(cells.len() * 2);
    for cell in results {
        runs.extend(cell?);
    }

    Ok(BenchReport {
        spec_hash: spec.hash(),
        seed: spec.seed,
        header: header_lines(spec, inputs),
        tasks: tasks.iter().map(|t| t.task.name.clone()).collect(),
        runs,
    })
}

pub(crate) fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs == 0 {
        return Err(Error::Config("jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn header_lines(spec: &BenchSpec, inputs: &[BenchInput]) -> Vec<(String, String)> {
    let mut h = vec![
        ("prng".to_string(), ALGORITHM.to_string()),
        (
            "model".to_string(),
            format!(
                "fold={} metric={} iterations={}",
                spec.fold, spec.metric, spec.iterations
            ),
        ),
        ("threshold".to_string(), spec.threshold.describe()),
        (
            "split".to_string(),
            format!(
                "stratified per class, train = floor({} * n_class), {} repetitions, REF fit on training targets only",
                spec.train_fraction, spec.repetitions
            ),
        ),
        (
            "base".to_string(),
            if spec.include_base {
                "single standardization step (J=1), same threshold mode".to_string()
            } else {
                "not run".to_string()
            },
        ),
    ];
    for input in inputs {
        let ds = &input.dataset;
        let mut line = format!(
            "N={} D={} classes={}",
            ds.n_samples(),
            ds.dim(),
            ds.class_names().join("|")
        );
        if let Some(note) = &input.note {
            line.push_str("; ");
            line.push_str(note);
        }
        h.push((format!("dataset {}", ds.name()), line));
    }
    h
}

fn run_cell(spec: &BenchSpec, task: &PreparedTask, r: usize) -> Result<Vec<RunRecord>> {
    let mut configs = vec![(Classifier::Ref, spec.model_config())];
    if spec.include_base {
        configs.push((Classifier::Base, ModelConfig::base(spec.metric)));
    }
    configs
        .into_iter()
        .map(|(classifier, config)| {
            let start = Instant::now();
            let (threshold, counts) = evaluate(spec, task, r, &config)?;
            let seconds = start.elapsed().as_secs_f64();
            Ok(RunRecord {
                task: task.task.name.clone(),
                classifier,
                repetition: r + 1,
                seed: task.split_seeds[r],
                threshold,
                counts,
                gmean: gmean(counts)?.gmean,
                seconds,
            })
        })
        .collect()
}

/// Threshold choice for one cell and configuration.
pub(crate) fn cell_threshold(
    spec: &BenchSpec,
    task: &PreparedTask,
    r: usize,
    config: &ModelConfig,
) -> Result<f64> {
    match &spec.threshold {
        ThresholdMode::Fixed { value } => Ok(*value),
        ThresholdMode::Grid { values, cv_folds } => {
            let train = &task.splits[r].train;
            let x = task.dataset.features().select_rows(train);
            let truth: Vec<bool> = train.iter().map(|&i| task.is_target[i]).collect();
            let grid = ThresholdGrid::new(values.clone())?;
            let sel = select_threshold(
                &x,
                &truth,
                config,
                &grid,
                *cv_folds,
                selection_seed(task.split_seeds[r]),
            )
            .map_err(|e| {
                Error::Selection(format!("task {} repetition {}: {e}", task.task.name, r + 1))
            })?;
            Ok(sel.threshold)
        }
    }
}

fn evaluate(
    spec: &BenchSpec,
    task: &PreparedTask,
    r: usize,
    config: &ModelConfig,
) -> Result<(f64, ConfusionCounts)> {
    let threshold = cell_threshold(spec, task, r, config)?;
    let model = config.train(&task.dataset.features().select_rows(&task.train_targets(r)))?;
    let counts = test_counts(&model, task, r, config, threshold)?;
    Ok((threshold, counts))
}

fn test_counts(
    model: &RefModel,
    task: &PreparedTask,
    r: usize,
    config: &ModelConfig,
    threshold: f64,
) -> Result<ConfusionCounts> {
    let test = &task.splits[r].test;
    let scores = test
        .iter()
        .map(|&i| model.score(task.dataset.features().row(i), config.metric))
        .collect::<Result<Vec<f64>>>()?;
    let truth: Vec<bool> = test.iter().map(|&i| task.is_target[i]).collect();
    Ok(ConfusionCounts::from_scores(&scores, &truth, threshold))
}
