use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{load_dataset, Dataset, DatasetSchema};
use crate::error::{Error, Result};
use crate::fold::{DistanceMetric, FoldOp};
use crate::model::{check_threshold, ModelConfig, DEFAULT_ITERATIONS, DEFAULT_THRESHOLD};
use crate::registry::Registry;
use crate::select::{ThresholdGrid, DEFAULT_CV_FOLDS, DEFAULT_GRID};
use crate::task::{DEFAULT_REPETITIONS, DEFAULT_TRAIN_FRACTION};

pub const DEFAULT_SEED: u64 = 42;

/// A benchmark dataset: a registry name, or a file with its own schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DatasetRef {
    Registered(String),
    File(FileDataset),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileDataset {
    /// Relative paths are resolved against the spec file's directory.
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task_prefix: Option<String>,
    #[serde(default)]
    pub schema: DatasetSchema,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum ThresholdMode {
    Fixed {
        #[serde(default = "default_threshold")]
        value: f64,
    },
    Grid {
        #[serde(default = "default_grid")]
        values: Vec<f64>,
        #[serde(default = "default_cv_folds")]
        cv_folds: usize,
    },
}

impl Default for ThresholdMode {
    fn default() -> Self {
        ThresholdMode::Fixed {
            value: DEFAULT_THRESHOLD,
        }
    }
}

impl ThresholdMode {
    pub fn describe(&self) -> String {
        match self {
            ThresholdMode::Fixed { value } => format!("fixed T={value}"),
            ThresholdMode::Grid { values, cv_folds } => {
                let v: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                format!(
                    "grid T in {{{}}} by stratified {cv_folds}-fold CV on the training split; \
                     ties to the T closest to 1, then the larger",
                    v.join(" ")
                )
            }
        }
    }
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}
fn default_grid() -> Vec<f64> {
    DEFAULT_GRID.to_vec()
}
fn default_cv_folds() -> usize {
    DEFAULT_CV_FOLDS
}
fn default_iterations() -> usize {
    DEFAULT_ITERATIONS
}
fn default_train_fraction() -> f64 {
    DEFAULT_TRAIN_FRACTION
}
fn default_repetitions() -> usize {
    DEFAULT_REPETITIONS
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn yes() -> bool {
    true
}

/// Declarative description of one benchmark run.
///
/// ```toml
/// datasets = ["iris", "seeds"]
/// fold = "abs"
/// metric = "l1"
/// iterations = 101
/// train_fraction = 0.7
/// repetitions = 5
/// seed = 42
/// include_base = true
///
/// [threshold]
/// mode = "fixed"   # or "grid" with `values` and `cv_folds`
/// value = 1.0
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    pub datasets: Vec<DatasetRef>,
    #[serde(default)]
    pub fold: FoldOp,
    #[serde(default)]
    pub metric: DistanceMetric,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "yes")]
    pub include_base: bool,
    #[serde(default)]
    pub threshold: ThresholdMode,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl BenchSpec {
    /// Default protocol over the given registry datasets.
    pub fn with_datasets<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Self {
            datasets: names
                .into_iter()
                .map(|n| DatasetRef::Registered(n.into()))
                .collect(),
            fold: FoldOp::default(),
            metric: DistanceMetric::default(),
            iterations: DEFAULT_ITERATIONS,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            repetitions: DEFAULT_REPETITIONS,
            seed: DEFAULT_SEED,
            include_base: true,
            threshold: ThresholdMode::default(),
            base_dir: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut spec = Self::parse(&text)?;
        spec.base_dir = path.parent().map(Path::to_path_buf);
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::Config("spec lists no datasets".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        match &self.threshold {
            ThresholdMode::Fixed { value } => check_threshold(*value)?,
            ThresholdMode::Grid { values, cv_folds } => {
                ThresholdGrid::new(values.clone())?;
                if *cv_folds < 2 {
                    return Err(Error::Config(format!(
                        "cv_folds must be at least 2, got {cv_folds}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn model_config(&self) -> ModelConfig {
        ModelConfig {
            iterations: self.iterations,
            fold: self.fold,
            metric: self.metric,
        }
    }

    /// Canonical TOML form: defaults filled in, comments and layout dropped.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("bench spec serializes")
    }

    /// Hex SHA-256 of [`canonical`](Self::canonical).
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Loads every dataset, in spec order.
    pub fn resolve(&self, registry: &Registry) -> Result<Vec<BenchInput>> {
        self.datasets
            .iter()
            .map(|r| match r {
                DatasetRef::Registered(name) => {
                    let dataset = registry.load(name)?;
                    let note = registry.manifest().entry(name).and_then(|e| e.note.clone());
                    Ok(BenchInput { dataset, note })
                }
                DatasetRef::File(f) => {
                    let path = match &self.base_dir {
                        Some(dir) if f.path.is_relative() => dir.join(&f.path),
                        _ => f.path.clone(),
                    };
                    let mut dataset = load_dataset(&path, &f.schema)?;
                    if let Some(name) = &f.name {
                        dataset = dataset.with_name(name.clone());
                    }
                    if let Some(prefix) = &f.task_prefix {
                        dataset = dataset.with_task_prefix(prefix.clone());
                    }
                    Ok(BenchInput {
                        dataset,
                        note: None,
                    })
                }
            })
            .collect()
    }
}

/// A loaded dataset plus the note echoed into the report header.
#[derive(Clone, Debug)]
pub struct BenchInput {
    pub dataset: Dataset,
    pub note: Option<String>,
}

impl From<Dataset> for BenchInput {
    fn from(dataset: Dataset) -> Self {
        Self {
            dataset,
            note: None,
        }
    }
}
