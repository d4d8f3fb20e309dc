//! Text persistence for trained models.
//!
//! ```text
//! ref-occ-model 1
//! fold abs
//! iterations 2
//! dim 1
//! mean 0.0000000000000000e0 std 1.0000000000000000e0
//! mean 6.6666666666666663e-1 std 5.7735026918962573e-1
//! ```
//!
//! One `mean … std …` line per step, in training order. Numbers carry 17
//! significant digits, which is enough to restore every `f64` exactly, and
//! the writer is canonical: parsing and re-serializing gives the same bytes.
//! UTF-8, LF line endings.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fold::FoldOp;
use crate::model::RefModel;
use crate::standardize::StandardizerStep;

pub const MAGIC: &str = "ref-occ-model";
pub const FORMAT_VERSION: &str = "1";

pub fn serialize_model(model: &RefModel) -> String {
    let mut out = String::new();
    writeln!(out, "{MAGIC} {FORMAT_VERSION}").unwrap();
    writeln!(out, "fold {}", model.fold()).unwrap();
    writeln!(out, "iterations {}", model.iterations()).unwrap();
    writeln!(out, "dim {}", model.dim()).unwrap();
    for step in model.steps() {
        out.push_str("mean");
        for v in step.mean() {
            write!(out, " {v:.16e}").unwrap();
        }
        out.push_str(" std");
        for v in step.std() {
            write!(out, " {v:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_model(text: &str) -> Result<RefModel> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let mut next = |what: &str| {
        lines
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| Error::ModelFormat(format!("truncated file: missing {what}")))
    };

    let (_, header) = next("header")?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(Error::ModelFormat(format!(
            "not a model file (expected '{MAGIC}' header, found '{header}')"
        )));
    }
    let version = parts.next().unwrap_or("");
    if version != FORMAT_VERSION {
        return Err(Error::Version {
            found: version.to_string(),
            supported: FORMAT_VERSION.to_string(),
        });
    }

    let fold: FoldOp = keyed(next("fold")?, "fold")?
        .parse()
        .map_err(|e: Error| Error::ModelFormat(e.to_string()))?;
    let iterations = count(next("iterations")?, "iterations")?;
    let dim = count(next("dim")?, "dim")?;
    if iterations == 0 || dim == 0 {
        return Err(Error::ModelFormat(
            "iterations and dim must be positive".into(),
        ));
    }

    let mut steps = Vec::with_capacity(iterations);
    for k in 0..iterations {
        let (line_no, line) = next(&format!("step {} of {iterations}", k + 1))?;
        steps.push(parse_step(line_no, line, dim)?);
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::ModelFormat(format!(
            "line {}: unexpected content after {iterations} steps",
            line_no + 1
        )));
    }
    RefModel::from_parts(fold, steps)
}

fn keyed<'a>((line_no, line): (usize, &'a str), key: &str) -> Result<&'a str> {
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == key => Ok(v),
        _ => Err(Error::ModelFormat(format!(
            "line {line_no}: expected '{key} <value>', found '{line}'"
        ))),
    }
}

fn count(line: (usize, &str), key: &str) -> Result<usize> {
    let line_no = line.0;
    keyed(line, key)?
        .parse()
        .map_err(|_| Error::ModelFormat(format!("line {line_no}: '{key}' is not a count")))
}

fn parse_step(line_no: usize, line: &str, dim: usize) -> Result<StandardizerStep> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 2 * dim + 2 || tokens[0] != "mean" || tokens[dim + 1] != "std" {
        return Err(Error::ModelFormat(format!(
            "line {line_no}: expected 'mean' + {dim} values + 'std' + {dim} values"
        )));
    }
    let numbers = |slice: &[&str]| -> Result<Vec<f64>> {
        slice
            .iter()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::ModelFormat(format!("line {line_no}: bad number '{t}'")))
            })
            .collect()
    };
    let mean = numbers(&tokens[1..=dim])?;
    let std = numbers(&tokens[dim + 2..])?;
    StandardizerStep::new(mean, std).map_err(|e| Error::ModelFormat(format!("line {line_no}: {e}")))
}

pub fn save_model(model: &RefModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, serialize_model(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<RefModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text)
}
