use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::fold::FoldOp;
use crate::matrix::Matrix;
use crate::model::RefModel;
use crate::rng::derive_seed;

use super::FORMAT_VERSION;

/// Timed runs per size; the median is reported.
pub const PROBE_RUNS: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRow {
    pub n: usize,
    pub dim: usize,
    pub iterations: usize,
    pub median_seconds: f64,
    pub runs: Vec<f64>,
}

/// `n x dim` standard-normal matrix, fully determined by `seed`.
pub fn synthetic_normal(n: usize, dim: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * dim)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    Matrix::new(n, dim, data).expect("dimensions match")
}

/// Median-of-3 training wall time on synthetic data for each `n`.
pub fn timing_probe(
    n_values: &[usize],
    dim: usize,
    iterations: usize,
    seed: u64,
) -> Result<Vec<ProbeRow>> {
    n_values
        .iter()
        .map(|&n| {
            let x = synthetic_normal(n, dim, derive_seed(seed, n as u64));
            let mut runs = Vec::with_capacity(PROBE_RUNS);
            for _ in 0..PROBE_RUNS {
                let start = Instant::now();
                let model = RefModel::train(&x, iterations, FoldOp::Abs)?;
                runs.push(start.elapsed().as_secs_f64());
                std::hint::black_box(model);
            }
            let mut sorted = runs.clone();
            sorted.sort_by(f64::total_cmp);
            Ok(ProbeRow {
                n,
                dim,
                iterations,
                median_seconds: sorted[PROBE_RUNS / 2],
                runs,
            })
        })
        .collect()
}

pub fn render_probe(rows: &[ProbeRow], seed: u64) -> String {
    let mut out = String::new();
    writeln!(out, "# ref-occ timing probe").unwrap();
    writeln!(out, "# format_version: {FORMAT_VERSION}").unwrap();
    writeln!(out, "# seed: {seed}").unwrap();
    writeln!(
        out,
        "# data: standard normal (chacha8); fold=abs; median of {PROBE_RUNS} runs"
    )
    .unwrap();
    writeln!(out, "n,dim,iterations,median_seconds,runs").unwrap();
    for r in rows {
        let runs: Vec<String> = r.runs.iter().map(|s| format!("{s:.6}")).collect();
        writeln!(
            out,
            "{},{},{},{:.6},{}",
            r.n,
            r.dim,
            r.iterations,
            r.median_seconds,
            runs.join(" ")
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn synthetic_data_is_reproducible() {
        assert_eq!(synthetic_normal(50, 3, 9), synthetic_normal(50, 3, 9));
        assert_ne!(synthetic_normal(50, 3, 9), synthetic_normal(50, 3, 10));
    }

    #[test]
    fn one_row_per_size() {
        let rows = timing_probe(&[100, 200, 400], 4, 5, 1).unwrap();
        assert_eq!(
            rows.iter().map(|r| r.n).collect::<Vec<_>>(),
            [100, 200, 400]
        );
        assert!(rows
            .iter()
            .all(|r| r.runs.len() == PROBE_RUNS && r.median_seconds >= 0.0));
        let text = render_probe(&rows, 1);
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
    }

    #[test]
    fn tiny_sizes_rejected() {
        for n in [0, 1] {
            assert!(matches!(
                timing_probe(&[n], 3, 5, 1),
                Err(Error::InsufficientData { .. })
            ));
        }
    }
}
