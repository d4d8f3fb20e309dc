use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::{gmean, ConfusionCounts};
use crate::rng::ALGORITHM;

use super::run::{prepare, with_pool, PreparedTask};
use super::spec::{BenchInput, BenchSpec, ThresholdMode};
use super::FORMAT_VERSION;

/// Test-set Gmean of one trained model truncated to each depth `1..=J`.
#[derive(Clone, Debug, PartialEq)]
pub struct LearningCurve {
    pub task: String,
    /// 1-based.
    pub repetition: usize,
    pub threshold: f64,
    /// `points[i]` is the Gmean (fraction) at depth `i + 1`.
    pub points: Vec<f64>,
}

/// Point-wise mean of several curves of equal length.
#[derive(Clone, Debug, PartialEq)]
pub struct AverageCurve {
    pub curves: usize,
    pub points: Vec<f64>,
}

fn fixed_threshold(spec: &BenchSpec) -> Result<f64> {
    match spec.threshold {
        ThresholdMode::Fixed { value } => Ok(value),
        ThresholdMode::Grid { .. } => Err(Error::Config(
            "learning curves need a fixed threshold; grid selection is not supported".into(),
        )),
    }
}

/// Curve for `task` (e.g. `Iris2`) at repetition `repetition` (1-based) of `spec`.
///
/// Uses the same split and training rows as the benchmark run, so the last
/// point equals that run's REF Gmean and the first equals its base Gmean.
pub fn learning_curve(
    spec: &BenchSpec,
    inputs: &[BenchInput],
    task: &str,
    repetition: usize,
) -> Result<LearningCurve> {
    spec.validate()?;
    let threshold = fixed_threshold(spec)?;
    let tasks = prepare(spec, inputs)?;
    let prepared = tasks.iter().find(|t| t.task.name == task).ok_or_else(|| {
        let known: Vec<&str> = tasks.iter().map(|t| t.task.name.as_str()).collect();
        Error::Config(format!(
            "unknown task '{task}' (available: {})",
            known.join(", ")
        ))
    })?;
    if repetition == 0 || repetition > spec.repetitions {
        return Err(Error::Config(format!(
            "repetition must be in 1..={}, got {repetition}",
            spec.repetitions
        )));
    }
    curve_for(spec, prepared, repetition - 1, threshold)
}

/// Every task x repetition curve of `spec`, in report order, plus their mean.
pub fn all_curves(
    spec: &BenchSpec,
    inputs: &[BenchInput],
    jobs: usize,
) -> Result<(Vec<LearningCurve>, AverageCurve)> {
    spec.validate()?;
    let threshold = fixed_threshold(spec)?;
    let tasks = prepare(spec, inputs)?;
    let cells: Vec<(usize, usize)> = (0..tasks.len())
        .flat_map(|t| (0..spec.repetitions).map(move |r| (t, r)))
        .collect();
    let curves = with_pool(jobs, || {
        cells
            .par_iter()
            .map(|&(t, r)| curve_for(spec, &tasks[t], r, threshold))
            .collect::<Result<Vec<_>>>()
    })??;
    let mut points = vec![0.0; spec.iterations];
    for c in &curves {
        for (acc, p) in points.iter_mut().zip(&c.points) {
            *acc += p;
        }
    }
    for p in &mut points {
        *p /= curves.len() as f64;
    }
    let average = AverageCurve {
        curves: curves.len(),
        points,
    };
    Ok((curves, average))
}

fn curve_for(
    spec: &BenchSpec,
    task: &PreparedTask,
    r: usize,
    threshold: f64,
) -> Result<LearningCurve> {
    let config = spec.model_config();
    let model = config.train(&task.dataset.features().select_rows(&task.train_targets(r)))?;
    let test = &task.splits[r].test;
    let traces = test
        .iter()
        .map(|&i| model.score_trace(task.dataset.features().row(i), config.metric))
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let truth: Vec<bool> = test.iter().map(|&i| task.is_target[i]).collect();
    let points = (0..model.iterations())
        .map(|depth| {
            let scores: Vec<f64> = traces.iter().map(|t| t[depth]).collect();
            Ok(gmean(ConfusionCounts::from_scores(&scores, &truth, threshold))?.gmean)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(LearningCurve {
        task: task.task.name.clone(),
        repetition: r + 1,
        threshold,
        points,
    })
}

fn curve_header(out: &mut String, spec: &BenchSpec) {
    writeln!(out, "# ref-occ learning curve").unwrap();
    writeln!(out, "# format_version: {FORMAT_VERSION}").unwrap();
    writeln!(out, "# spec_sha256: {}", spec.hash()).unwrap();
    writeln!(out, "# seed: {}", spec.seed).unwrap();
    writeln!(out, "# prng: {ALGORITHM}").unwrap();
    writeln!(
        out,
        "# model: fold={} metric={} iterations={}",
        spec.fold, spec.metric, spec.iterations
    )
    .unwrap();
}

impl LearningCurve {
    pub fn render(&self, spec: &BenchSpec) -> String {
        let mut out = String::new();
        curve_header(&mut out, spec);
        writeln!(out, "# task: {} repetition {}", self.task, self.repetition).unwrap();
        writeln!(out, "# threshold: {}", self.threshold).unwrap();
        writeln!(out, "iteration,gmean").unwrap();
        for (i, g) in self.points.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, g).unwrap();
        }
        out
    }
}

impl AverageCurve {
    pub fn render(&self, spec: &BenchSpec) -> String {
        let mut out = String::new();
        curve_header(&mut out, spec);
        writeln!(
            out,
            "# average over {} task x repetition curves",
            self.curves
        )
        .unwrap();
        writeln!(out, "iteration,gmean").unwrap();
        for (i, g) in self.points.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, g).unwrap();
        }
        out
    }
}
