//! One-class tasks over labeled datasets, stratified train/test splits and
//! k-fold partitions.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, SplitMix64};

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.7;
pub const DEFAULT_REPETITIONS: usize = 5;

/// One class of a dataset taken as the target, every other class as outliers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccTask {
    pub dataset: String,
    /// Index into the dataset's `class_names`.
    pub target_label: usize,
    pub target_class: String,
    /// Display name such as `Iris2`.
    pub name: String,
}

impl OccTask {
    pub fn is_target(&self, label: usize) -> bool {
        label == self.target_label
    }

    /// Target mask over the dataset rows.
    pub fn target_mask(&self, dataset: &Dataset) -> Vec<bool> {
        dataset
            .labels()
            .iter()
            .map(|&l| self.is_target(l))
            .collect()
    }
}

/// One task per class in first-appearance order, named `<prefix><k>` with `k`
/// starting at 1.
pub fn make_occ_tasks(dataset: &Dataset) -> Result<Vec<OccTask>> {
    if dataset.class_names().len() < 2 {
        return Err(Error::Config(format!(
            "dataset '{}' has {} class(es); one-class tasks need at least 2",
            dataset.name(),
            dataset.class_names().len()
        )));
    }
    Ok(dataset
        .class_names()
        .iter()
        .enumerate()
        .map(|(k, class)| OccTask {
            dataset: dataset.name().to_string(),
            target_label: k,
            target_class: class.clone(),
            name: format!("{}{}", dataset.task_prefix(), k + 1),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    /// Sorted row indices.
    pub train: Vec<usize>,
    /// Sorted row indices.
    pub test: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitPlan {
    pub seed: u64,
    pub train_fraction: f64,
    pub splits: Vec<Split>,
}

impl SplitPlan {
    pub fn repetitions(&self) -> usize {
        self.splits.len()
    }
}

/// Number of training items taken from a group of `n`: `floor(fraction * n)`.
///
/// A 1e-9 guard absorbs representation error so that e.g. `0.7 * 50` gives 35.
pub fn train_count(fraction: f64, n: usize) -> usize {
    (fraction * n as f64 + 1e-9).floor() as usize
}

/// Seeded stratified splits, one per repetition.
///
/// Repetition `r` uses a SplitMix64 stream seeded with `derive_seed(seed, r)`.
/// The target rows (ascending) are shuffled and the first
/// `floor(fraction * n_targets)` go to training; the outlier rows are then
/// shuffled with the same stream and split the same way.
pub fn make_split_plan(
    dataset: &Dataset,
    task: &OccTask,
    train_fraction: f64,
    repetitions: usize,
    seed: u64,
) -> Result<SplitPlan> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    if repetitions == 0 {
        return Err(Error::Config("repetitions must be at least 1".into()));
    }
    let (targets, outliers): (Vec<usize>, Vec<usize>) =
        (0..dataset.n_samples()).partition(|&i| task.is_target(dataset.labels()[i]));

    for (group, rows) in [("target", &targets), ("outlier", &outliers)] {
        let k = train_count(train_fraction, rows.len());
        if k == 0 || k == rows.len() {
            return Err(Error::Config(format!(
                "task {}: fraction {train_fraction} of {} {group} rows leaves an empty train or test side",
                task.name,
                rows.len()
            )));
        }
    }
    if train_count(train_fraction, targets.len()) < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            got: train_count(train_fraction, targets.len()),
        });
    }

    let splits = (0..repetitions)
        .map(|r| {
            let mut rng = SplitMix64::new(derive_seed(seed, r as u64));
            let mut train = Vec::new();
            let mut test = Vec::new();
            for rows in [&targets, &outliers] {
                let mut shuffled = rows.clone();
                rng.shuffle(&mut shuffled);
                let k = train_count(train_fraction, rows.len());
                train.extend_from_slice(&shuffled[..k]);
                test.extend_from_slice(&shuffled[k..]);
            }
            train.sort_unstable();
            test.sort_unstable();
            Split { train, test }
        })
        .collect();

    Ok(SplitPlan {
        seed,
        train_fraction,
        splits,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Shuffles `indices` with SplitMix64(`seed`) and cuts them into `k`
/// contiguous validation blocks; the first `len % k` blocks get one extra item.
/// Both sides of every fold are returned sorted.
pub fn kfold(indices: &[usize], k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::Config(format!("k-fold needs k >= 2, got {k}")));
    }
    if indices.len() < k {
        return Err(Error::Config(format!(
            "cannot cut {} items into {k} folds",
            indices.len()
        )));
    }
    let mut shuffled = indices.to_vec();
    SplitMix64::new(seed).shuffle(&mut shuffled);

    let base = shuffled.len() / k;
    let extra = shuffled.len() % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        let mut validation = shuffled[start..start + len].to_vec();
        let mut train: Vec<usize> = shuffled[..start]
            .iter()
            .chain(&shuffled[start + len..])
            .copied()
            .collect();
        validation.sort_unstable();
        train.sort_unstable();
        folds.push(Fold { train, validation });
        start += len;
    }
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use proptest::prelude::*;

    fn labeled(counts: &[usize]) -> Dataset {
        let labels: Vec<usize> = counts
            .iter()
            .enumerate()
            .flat_map(|(c, &n)| std::iter::repeat_n(c, n))
            .collect();
        let n = labels.len();
        let features = Matrix::new(n, 1, (0..n).map(|i| i as f64).collect()).unwrap();
        let names = (0..counts.len()).map(|c| format!("c{c}")).collect();
        Dataset::new("toy", features, labels, names).unwrap()
    }

    #[test]
    fn one_task_per_class() {
        let ds = labeled(&[50, 50, 50]).with_task_prefix("Iris");
        let tasks = make_occ_tasks(&ds).unwrap();
        let names: Vec<_> = tasks.iter().map(|t| t.name.as_str()).collect();
        assert_eq!(names, ["Iris1", "Iris2", "Iris3"]);
        assert_eq!(tasks[1].target_class, "c1");
        assert_eq!(make_occ_tasks(&labeled(&[225, 126])).unwrap().len(), 2);
    }

    #[test]
    fn single_class_rejected() {
        assert!(matches!(
            make_occ_tasks(&labeled(&[10])),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn floor_sizing() {
        assert_eq!(train_count(0.7, 50), 35);
        assert_eq!(train_count(0.7, 70), 49);
        assert_eq!(train_count(0.7, 225), 157);
        assert_eq!(train_count(0.7, 126), 88);
        assert_eq!(train_count(0.7, 97), 67);
        assert_eq!(train_count(0.7, 111), 77);
        assert_eq!(train_count(0.7, 143), 100);
        assert_eq!(train_count(0.7, 107), 74);
        assert_eq!(train_count(0.7, 66), 46);
        assert_eq!(train_count(0.7, 77), 53);
    }

    #[test]
    fn iris_like_split_sizes() {
        let ds = labeled(&[50, 50, 50]);
        let task = &make_occ_tasks(&ds).unwrap()[0];
        let plan = make_split_plan(&ds, task, 0.7, 5, 42).unwrap();
        assert_eq!(plan.repetitions(), 5);
        for s in &plan.splits {
            let targets = s.train.iter().filter(|&&i| ds.labels()[i] == 0).count();
            assert_eq!(targets, 35);
            assert_eq!(s.train.len(), 35 + 70);
            assert_eq!(s.test.len(), 150 - 105);
        }
        assert_ne!(plan.splits[0], plan.splits[1]);
    }

    #[test]
    fn same_seed_same_split() {
        let ds = labeled(&[70, 140]);
        let task = &make_occ_tasks(&ds).unwrap()[0];
        let a = make_split_plan(&ds, task, 0.7, 3, 11).unwrap();
        let b = make_split_plan(&ds, task, 0.7, 3, 11).unwrap();
        assert_eq!(a, b);
        let c = make_split_plan(&ds, task, 0.7, 3, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn degenerate_plans_rejected() {
        let ds = labeled(&[3, 10]);
        let task = &make_occ_tasks(&ds).unwrap()[0];
        assert!(make_split_plan(&ds, task, 0.0, 1, 0).is_err());
        assert!(make_split_plan(&ds, task, 1.0, 1, 0).is_err());
        assert!(make_split_plan(&ds, task, 0.5, 0, 0).is_err());
        // floor(0.5 * 3) = 1 target training row
        assert!(make_split_plan(&ds, task, 0.5, 1, 0).is_err());
    }

    #[test]
    fn kfold_sizes() {
        let idx: Vec<usize> = (0..10).collect();
        let folds = kfold(&idx, 5, 3).unwrap();
        assert!(folds
            .iter()
            .all(|f| f.validation.len() == 2 && f.train.len() == 8));

        let idx: Vec<usize> = (0..11).collect();
        let sizes: Vec<usize> = kfold(&idx, 5, 3)
            .unwrap()
            .iter()
            .map(|f| f.validation.len())
            .collect();
        assert_eq!(sizes, [3, 2, 2, 2, 2]);

        assert_eq!(kfold(&idx, 5, 3).unwrap(), kfold(&idx, 5, 3).unwrap());
        assert!(kfold(&idx, 12, 0).is_err());
        assert!(kfold(&idx, 1, 0).is_err());
    }

    proptest! {
        #[test]
        fn splits_are_stratified_partitions(
            n_target in 4usize..60,
            n_outlier in 4usize..90,
            fraction in 0.3f64..0.9,
            seed in any::<u64>(),
        ) {
            let ds = labeled(&[n_target, n_outlier]);
            let task = &make_occ_tasks(&ds).unwrap()[0];
            let Ok(plan) = make_split_plan(&ds, task, fraction, 2, seed) else { return Ok(()); };
            for s in &plan.splits {
                let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
                all.sort_unstable();
                prop_assert_eq!(all, (0..ds.n_samples()).collect::<Vec<_>>());
                let t = s.train.iter().filter(|&&i| ds.labels()[i] == 0).count() as f64;
                let o = s.train.len() as f64 - t;
                prop_assert!((t - fraction * n_target as f64).abs() < 1.0);
                prop_assert!((o - fraction * n_outlier as f64).abs() < 1.0);
            }
        }

        #[test]
        fn kfold_partitions(n in 2usize..100, k in 2usize..10, seed in any::<u64>()) {
            prop_assume!(n >= k);
            let idx: Vec<usize> = (0..n).map(|i| i * 3).collect();
            let folds = kfold(&idx, k, seed).unwrap();
            let mut all: Vec<usize> = folds.iter().flat_map(|f| f.validation.clone()).collect();
            all.sort_unstable();
            prop_assert_eq!(&all, &idx);
            let sizes: Vec<usize> = folds.iter().map(|f| f.validation.len()).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            for f in &folds {
                prop_assert_eq!(f.train.len() + f.validation.len(), n);
                prop_assert!(f.train.iter().all(|i| f.validation.binary_search(i).is_err()));
            }
        }
    }
}
