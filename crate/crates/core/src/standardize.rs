//! Per-dimension z-score standardization with fixed-order reductions.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Divisor offset used for the standard deviation (`N - 1`, the sample estimate).
/// Part of the model format: changing it changes every trained model.
pub const STD_DDOF: usize = 1;

/// One `(mean, std)` pair per dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardizerStep {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl StandardizerStep {
    /// Builds a step from stored vectors. Every `std` entry must be finite and positive.
    pub fn new(mean: Vec<f64>, std: Vec<f64>) -> Result<Self> {
        if mean.len() != std.len() {
            return Err(Error::Shape {
                expected: mean.len(),
                got: std.len(),
            });
        }
        if mean.is_empty() {
            return Err(Error::InvalidInput("standardizer has no dimensions".into()));
        }
        if let Some(d) = mean.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite mean at dimension {d}"
            )));
        }
        if let Some(d) = std.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "standard deviation at dimension {d} must be finite and positive, got {}",
                std[d]
            )));
        }
        Ok(Self { mean, std })
    }

    /// Column means and sample standard deviations of `x`.
    ///
    /// A column counts as constant when its values are identical or its
    /// deviation is below `CONSTANT_REL_TOL` times its largest magnitude, so
    /// rounding residue is not mistaken for spread. Constant columns get a
    /// deviation of 1 and are only centered.
    pub fn fit(x: &Matrix) -> Result<Self> {
        Self::check_fit_input(x)?;
        let (mean, std) = column_moments(x);
        Ok(Self { mean, std })
    }

    /// At least two rows, at least one column, all values finite.
    pub(crate) fn check_fit_input(x: &Matrix) -> Result<()> {
        if x.rows() < 2 {
            return Err(Error::InsufficientData {
                required: 2,
                got: x.rows(),
            });
        }
        if x.cols() == 0 {
            return Err(Error::InvalidInput("data has no feature columns".into()));
        }
        if !x.is_finite() {
            return Err(Error::InvalidInput(
                "data contains non-finite values".into(),
            ));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    /// `(x_d - mean_d) / std_d` for every dimension.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = x.to_vec();
        self.apply_in_place(&mut out)?;
        Ok(out)
    }

    pub fn apply_in_place(&self, x: &mut [f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Shape {
                expected: self.dim(),
                got: x.len(),
            });
        }
        self.apply_unchecked(x);
        Ok(())
    }

    #[inline]
    pub(crate) fn apply_unchecked(&self, x: &mut [f64]) {
        for ((v, m), s) in x.iter_mut().zip(&self.mean).zip(&self.std) {
            *v = (*v - m) / s;
        }
    }
}

/// Relative spread below which a column is treated as constant.
pub const CONSTANT_REL_TOL: f64 = 1e-10;

/// Means and sanitized stds of every column.
fn column_moments(x: &Matrix) -> (Vec<f64>, Vec<f64>) {
    let mut column = vec![0.0; x.rows()];
    let mut out = (Vec::with_capacity(x.cols()), Vec::with_capacity(x.cols()));
    for k in 0..x.cols() {
        for (c, row) in column.iter_mut().zip(x.iter_rows()) {
            *c = row[k];
        }
        let (m, s, _) = column_stats(&column);
        out.0.push(m);
        out.1.push(s);
    }
    out
}

/// Mean, sanitized std and constant flag of one column; sums run in order.
fn column_stats(col: &[f64]) -> (f64, f64, bool) {
    let n = col.len();
    let mut sum = 0.0;
    let mut peak = 0.0f64;
    for &v in col {
        sum += v;
        peak = peak.max(v.abs());
    }
    let mean = sum / n as f64;
    let mut ss = 0.0;
    for &v in col {
        let dev = v - mean;
        ss += dev * dev;
    }
    let (s, flat) = std_from_sum_sq(ss, n, peak);
    (mean, s, flat)
}

/// Sample std from a sum of squared deviations, and whether the column is
/// constant (spread below `CONSTANT_REL_TOL` of its largest magnitude; std 1).
#[inline]
pub(crate) fn std_from_sum_sq(ss: f64, n: usize, peak: f64) -> (f64, bool) {
    let s = (ss / (n - STD_DDOF) as f64).sqrt();
    // NaN spread counts as constant
    let flat = s.partial_cmp(&(CONSTANT_REL_TOL * peak)) != Some(std::cmp::Ordering::Greater);
    (if flat { 1.0 } else { sanitize_std(s) }, flat)
}

#[inline]
fn sanitize_std(s: f64) -> f64 {
    if s.is_finite() && s > 0.0 {
        s
    } else {
        1.0
    }
}
