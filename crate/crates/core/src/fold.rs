//! Element-wise folding maps and distance-to-origin metrics.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Element-wise map applied between standardizations.
///
/// `Abs`, `Sqr` and `CosAbs` fold the real line once around the origin;
/// `Cos` and `Sin` fold it many times; `Tanh` only squashes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FoldOp {
    #[default]
    Abs,
    Sqr,
    /// `cos(x)` on the closed interval `[-1, 1]`, `|x|` outside it.
    CosAbs,
    Cos,
    Sin,
    Tanh,
}

impl FoldOp {
    pub const ALL: [FoldOp; 6] = [
        FoldOp::Abs,
        FoldOp::Sqr,
        FoldOp::CosAbs,
        FoldOp::Cos,
        FoldOp::Sin,
        FoldOp::Tanh,
    ];

    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            FoldOp::Abs => x.abs(),
            FoldOp::Sqr => x * x,
            FoldOp::CosAbs => {
                if (-1.0..=1.0).contains(&x) {
                    x.cos()
                } else {
                    x.abs()
                }
            }
            FoldOp::Cos => x.cos(),
            FoldOp::Sin => x.sin(),
            FoldOp::Tanh => x.tanh(),
        }
    }

    /// Applies the map to every element of a sample. Non-finite input is rejected.
    pub fn apply_slice(self, x: &[f64]) -> Result<Vec<f64>> {
        if let Some(d) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value {} at dimension {d}",
                x[d]
            )));
        }
        Ok(x.iter().map(|&v| self.apply(v)).collect())
    }

    pub fn name(self) -> &'static str {
        match self {
            FoldOp::Abs => "abs",
            FoldOp::Sqr => "sqr",
            FoldOp::CosAbs => "cos-abs",
            FoldOp::Cos => "cos",
            FoldOp::Sin => "sin",
            FoldOp::Tanh => "tanh",
        }
    }
}

impl fmt::Display for FoldOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FoldOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "abs" => Ok(FoldOp::Abs),
            "sqr" => Ok(FoldOp::Sqr),
            "cos-abs" | "cos_abs" | "cosabs" => Ok(FoldOp::CosAbs),
            "cos" => Ok(FoldOp::Cos),
            "sin" => Ok(FoldOp::Sin),
            "tanh" => Ok(FoldOp::Tanh),
            other => Err(Error::Config(format!(
                "unknown fold operation '{other}' (expected one of abs, sqr, cos-abs, cos, sin, tanh)"
            ))),
        }
    }
}

impl TryFrom<String> for FoldOp {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FoldOp> for String {
    fn from(op: FoldOp) -> String {
        op.name().to_string()
    }
}

/// Distance of a transformed sample to the origin, normalized by dimensionality.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DistanceMetric {
    /// `Σ|v_d| / D`
    #[default]
    L1OverD,
    /// `sqrt(Σ v_d²) / D`
    L2OverD,
}

impl DistanceMetric {
    pub const ALL: [DistanceMetric; 2] = [DistanceMetric::L1OverD, DistanceMetric::L2OverD];

    /// Summation runs left to right so the result is reproducible.
    pub fn distance(self, v: &[f64]) -> f64 {
        let d = v.len() as f64;
        match self {
            DistanceMetric::L1OverD => v.iter().fold(0.0, |acc, x| acc + x.abs()) / d,
            DistanceMetric::L2OverD => v.iter().fold(0.0, |acc, x| acc + x * x).sqrt() / d,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DistanceMetric::L1OverD => "l1",
            DistanceMetric::L2OverD => "l2",
        }
    }
}

impl fmt::Display for DistanceMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistanceMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l1" | "l1/d" | "l1_over_d" => Ok(DistanceMetric::L1OverD),
            "l2" | "l2/d" | "l2_over_d" => Ok(DistanceMetric::L2OverD),
            other => Err(Error::Config(format!(
                "unknown distance metric '{other}' (expected l1 or l2)"
            ))),
        }
    }
}

impl TryFrom<String> for DistanceMetric {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DistanceMetric> for String {
    fn from(m: DistanceMetric) -> String {
        m.name().to_string()
    }
}
