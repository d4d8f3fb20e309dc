//! Confusion counts and the Gmean metric. Targets are the positive class.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fn_: usize,
    pub tn: usize,
    pub fp: usize,
}

impl ConfusionCounts {
    /// Tallies `(is_target, accepted)` pairs.
    pub fn tally(pairs: impl IntoIterator<Item = (bool, bool)>) -> Self {
        let mut c = Self::default();
        for (is_target, accepted) in pairs {
            match (is_target, accepted) {
                (true, true) => c.tp += 1,
                (true, false) => c.fn_ += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fp += 1,
            }
        }
        c
    }

    /// Tallies scores against a threshold (`score <= threshold` is accepted).
    pub fn from_scores(scores: &[f64], is_target: &[bool], threshold: f64) -> Self {
        Self::tally(
            scores
                .iter()
                .zip(is_target)
                .map(|(&s, &t)| (t, s <= threshold)),
        )
    }

    pub fn targets(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn outliers(&self) -> usize {
        self.tn + self.fp
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalResult {
    pub counts: ConfusionCounts,
    pub tpr: f64,
    pub tnr: f64,
    pub gmean: f64,
}

/// `sqrt(TPR * TNR)`. Both classes must be present.
pub fn gmean(counts: ConfusionCounts) -> Result<EvalResult> {
    if counts.targets() == 0 {
        return Err(Error::Evaluation(
            "no target samples in the test pool".into(),
        ));
    }
    if counts.outliers() == 0 {
        return Err(Error::Evaluation(
            "no outlier samples in the test pool".into(),
        ));
    }
    let tpr = counts.tp as f64 / counts.targets() as f64;
    let tnr = counts.tn as f64 / counts.outliers() as f64;
    Ok(EvalResult {
        counts,
        tpr,
        tnr,
        gmean: (tpr * tnr).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn counts(tp: usize, fn_: usize, tn: usize, fp: usize) -> ConfusionCounts {
        ConfusionCounts { tp, fn_, tn, fp }
    }

    #[test]
    fn perfect() {
        let r = gmean(counts(5, 0, 7, 0)).unwrap();
        assert_eq!((r.tpr, r.tnr, r.gmean), (1.0, 1.0, 1.0));
    }

    #[test]
    fn zero_tpr() {
        assert_eq!(gmean(counts(0, 4, 3, 1)).unwrap().gmean, 0.0);
    }

    #[test]
    fn worked_example() {
        let r = gmean(counts(9, 1, 16, 9)).unwrap();
        assert_eq!(r.tpr, 0.9);
        assert_eq!(r.tnr, 0.64);
        // sqrt(0.576)
        assert!((r.gmean - 0.758_946_638_440_411_4).abs() < 1e-15);
    }

    #[test]
    fn empty_pools() {
        assert!(matches!(
            gmean(counts(0, 0, 1, 1)),
            Err(Error::Evaluation(_))
        ));
        assert!(matches!(
            gmean(counts(1, 1, 0, 0)),
            Err(Error::Evaluation(_))
        ));
    }

    #[test]
    fn threshold_is_inclusive() {
        let c =
            ConfusionCounts::from_scores(&[1.0, 1.5, 0.2, 1.0], &[true, true, false, false], 1.0);
        assert_eq!(c, counts(1, 1, 0, 2));
    }

    proptest! {
        #[test]
        fn gmean_bounds(tp in 0usize..50, fn_ in 0usize..50, tn in 0usize..50, fp in 0usize..50) {
            prop_assume!(tp + fn_ > 0 && tn + fp > 0);
            let r = gmean(counts(tp, fn_, tn, fp)).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.gmean));
            prop_assert_eq!(r.gmean == 0.0, tp == 0 || tn == 0);
        }
    }
}
