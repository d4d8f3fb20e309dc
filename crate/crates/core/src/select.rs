//! Cross-validated selection of the decision threshold.

use crate::error::{Error, Result};
use crate::eval::{gmean, ConfusionCounts};
use crate::matrix::Matrix;
use crate::model::{ModelConfig, DEFAULT_THRESHOLD};
use crate::rng::derive_seed;
use crate::task::kfold;

pub const DEFAULT_CV_FOLDS: usize = 5;
pub const DEFAULT_GRID: [f64; 9] = [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1];

/// Mean-Gmean differences below this are ties.
const TIE_EPS: f64 = 1e-12;

/// Candidate thresholds: non-empty, strictly increasing, positive.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdGrid(Vec<f64>);

impl ThresholdGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("threshold grid is empty".into()));
        }
        if values.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Config(format!(
                "threshold grid values must be positive and finite: {values:?}"
            )));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "threshold grid must be strictly increasing: {values:?}"
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl Default for ThresholdGrid {
    fn default() -> Self {
        Self(DEFAULT_GRID.to_vec())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdSelection {
    pub threshold: f64,
    /// Mean validation Gmean of every grid value, in grid order.
    pub mean_gmean: Vec<f64>,
}

/// Picks the grid threshold with the best mean validation Gmean.
///
/// Targets and outliers of the training pool are cut into `k` folds
/// separately (seeds `derive_seed(seed, 0)` and `derive_seed(seed, 1)`) and
/// fold `f` pairs the f-th block of each. Each fold fits a model on its
/// training targets only; its outliers are used only for scoring. Ties go to
/// the threshold closest to the default `T = 1`, then to the larger one.
pub fn select_threshold(
    x: &Matrix,
    is_target: &[bool],
    config: &ModelConfig,
    grid: &ThresholdGrid,
    k: usize,
    seed: u64,
) -> Result<ThresholdSelection> {
    if is_target.len() != x.rows() {
        return Err(Error::InvalidInput(format!(
            "{} target flags for {} rows",
            is_target.len(),
            x.rows()
        )));
    }
    let (targets, outliers): (Vec<usize>, Vec<usize>) = (0..x.rows()).partition(|&i| is_target[i]);
    if outliers.is_empty() {
        return Err(Error::Selection(
            "training pool has no outliers; use the default threshold T = 1".into(),
        ));
    }
    if targets.len() < k || outliers.len() < k {
        return Err(Error::Selection(format!(
            "{k}-fold selection needs at least {k} targets and {k} outliers, got {} and {}",
            targets.len(),
            outliers.len()
        )));
    }

    let target_folds = kfold(&targets, k, derive_seed(seed, 0))?;
    let outlier_folds = kfold(&outliers, k, derive_seed(seed, 1))?;

    let mut sums = vec![0.0; grid.values().len()];
    for (tf, of) in target_folds.iter().zip(&outlier_folds) {
        let model = config.train(&x.select_rows(&tf.train))?;
        let validation: Vec<usize> = tf
            .validation
            .iter()
            .chain(&of.validation)
            .copied()
            .collect();
        let scores = validation
            .iter()
            .map(|&i| model.score(x.row(i), config.metric))
            .collect::<Result<Vec<f64>>>()?;
        let truth: Vec<bool> = validation.iter().map(|&i| is_target[i]).collect();
        for (sum, &t) in sums.iter_mut().zip(grid.values()) {
            *sum += gmean(ConfusionCounts::from_scores(&scores, &truth, t))?.gmean;
        }
    }
    let mean_gmean: Vec<f64> = sums.iter().map(|s| s / k as f64).collect();
    let threshold = best_threshold(grid.values(), &mean_gmean);
    Ok(ThresholdSelection {
        threshold,
        mean_gmean,
    })
}

fn best_threshold(grid: &[f64], mean_gmean: &[f64]) -> f64 {
    let mut best = 0;
    for i in 1..grid.len() {
        let (g, gb) = (mean_gmean[i], mean_gmean[best]);
        let better = if (g - gb).abs() > TIE_EPS {
            g > gb
        } else {
            let (d, db) = (
                (grid[i] - DEFAULT_THRESHOLD).abs(),
                (grid[best] - DEFAULT_THRESHOLD).abs(),
            );
            if (d - db).abs() > TIE_EPS {
                d < db
            } else {
                grid[i] > grid[best]
            }
        };
        if better {
            best = i;
        }
    }
    grid[best]
}
