//! Checked-in manifest of the benchmark datasets.
//!
//! Data files are not downloaded; they are expected under a local data
//! directory (`REF_OCC_DATA_DIR`, default `./data`). Every load is checked
//! against the manifest's class, sample and feature counts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{load_dataset, Dataset, DatasetSchema};
use crate::error::{Error, Result};

pub const DATA_DIR_ENV: &str = "REF_OCC_DATA_DIR";

const BUILTIN_MANIFEST: &str = include_str!("../../../data/manifest.toml");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub name: String,
    /// Relative to the data directory.
    pub file: String,
    pub task_prefix: String,
    pub classes: usize,
    pub samples: usize,
    pub features: usize,
    #[serde(default)]
    pub note: Option<String>,
    #[serde(default)]
    pub schema: DatasetSchema,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(rename = "dataset")]
    pub datasets: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_MANIFEST).expect("built-in manifest is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn entry(&self, name: &str) -> Option<&ManifestEntry> {
        self.datasets
            .iter()
            .find(|e| e.name.eq_ignore_ascii_case(name))
    }
}

/// The default data directory: `$REF_OCC_DATA_DIR`, else `./data`.
pub fn default_data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV).map_or_else(|| PathBuf::from("data"), PathBuf::from)
}

#[derive(Clone, Debug)]
pub struct Registry {
    manifest: Manifest,
    data_dir: PathBuf,
}

impl Registry {
    pub fn new(manifest: Manifest, data_dir: impl Into<PathBuf>) -> Self {
        Self {
            manifest,
            data_dir: data_dir.into(),
        }
    }

    pub fn builtin(data_dir: impl Into<PathBuf>) -> Self {
        Self::new(Manifest::builtin(), data_dir)
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn data_dir(&self) -> &Path {
        &self.data_dir
    }

    pub fn path_of(&self, name: &str) -> Result<PathBuf> {
        Ok(self.data_dir.join(&self.lookup(name)?.file))
    }

    pub fn is_available(&self, name: &str) -> bool {
        self.path_of(name).is_ok_and(|p| p.is_file())
    }

    /// Loads a registered dataset and verifies it against the manifest.
    pub fn load(&self, name: &str) -> Result<Dataset> {
        let entry = self.lookup(name)?;
        let path = self.data_dir.join(&entry.file);
        if !path.is_file() {
            return Err(Error::Dataset(format!(
                "dataset '{}' not found at {}; download it from the UCI repository and place it there",
                entry.name,
                path.display()
            )));
        }
        let ds = load_dataset(&path, &entry.schema)?
            .with_name(entry.name.clone())
            .with_task_prefix(entry.task_prefix.clone());
        verify(entry, &ds)?;
        Ok(ds)
    }

    fn lookup(&self, name: &str) -> Result<&ManifestEntry> {
        self.manifest.entry(name).ok_or_else(|| {
            let known: Vec<&str> = self
                .manifest
                .datasets
                .iter()
                .map(|e| e.name.as_str())
                .collect();
            Error::Config(format!(
                "unknown dataset '{name}' (registered: {})",
                known.join(", ")
            ))
        })
    }
}

fn verify(entry: &ManifestEntry, ds: &Dataset) -> Result<()> {
    let checks = [
        ("classes", entry.classes, ds.n_classes()),
        ("samples", entry.samples, ds.n_samples()),
        ("features", entry.features, ds.dim()),
    ];
    for (what, expected, got) in checks {
        if expected != got {
            return Err(Error::Manifest {
                name: entry.name.clone(),
                message: format!("expected {expected} {what}, file has {got}"),
            });
        }
    }
    Ok(())
}
