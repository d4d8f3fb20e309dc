use std::fmt::Write as _;

use crate::eval::ConfusionCounts;

use super::FORMAT_VERSION;

/// Label used for the all-task average rows.
pub const AVERAGE_ROW: &str = "Aver.";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classifier {
    Ref,
    Base,
}

impl Classifier {
    pub fn name(self) -> &'static str {
        match self {
            Classifier::Ref => "ref",
            Classifier::Base => "base",
        }
    }
}

/// One task, repetition and classifier.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub task: String,
    pub classifier: Classifier,
    /// 1-based.
    pub repetition: usize,
    /// Seed of this repetition's split.
    pub seed: u64,
    pub threshold: f64,
    pub counts: ConfusionCounts,
    /// Gmean as a fraction.
    pub gmean: f64,
    pub seconds: f64,
}

/// Mean and sample std of Gmean over the repetitions, in percent.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskSummary {
    pub task: String,
    pub classifier: Classifier,
    pub mean: f64,
    pub std: f64,
    pub runs: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub spec_hash: String,
    pub seed: u64,
    /// `# key: value` lines written into the header.
    pub header: Vec<(String, String)>,
    /// Task order as run.
    pub tasks: Vec<String>,
    /// Ordered by task, then repetition, then classifier (REF first).
    pub runs: Vec<RunRecord>,
}

impl BenchReport {
    pub fn summaries(&self) -> Vec<TaskSummary> {
        let mut out = Vec::new();
        for task in &self.tasks {
            for classifier in [Classifier::Ref, Classifier::Base] {
                let values: Vec<f64> = self
                    .runs
                    .iter()
                    .filter(|r| &r.task == task && r.classifier == classifier)
                    .map(|r| 100.0 * r.gmean)
                    .collect();
                if values.is_empty() {
                    continue;
                }
                let (mean, std) = mean_std(&values);
                out.push(TaskSummary {
                    task: task.clone(),
                    classifier,
                    mean,
                    std,
                    runs: values.len(),
                });
            }
        }
        out
    }

    pub fn summary(&self, task: &str, classifier: Classifier) -> Option<TaskSummary> {
        self.summaries()
            .into_iter()
            .find(|s| s.task == task && s.classifier == classifier)
    }

    /// Unweighted mean over tasks of the per-task means and of the per-task stds.
    pub fn average(&self, classifier: Classifier) -> Option<(f64, f64)> {
        let rows: Vec<TaskSummary> = self
            .summaries()
            .into_iter()
            .filter(|s| s.classifier == classifier)
            .collect();
        if rows.is_empty() {
            return None;
        }
        let n = rows.len() as f64;
        Some((
            rows.iter().map(|s| s.mean).sum::<f64>() / n,
            rows.iter().map(|s| s.std).sum::<f64>() / n,
        ))
    }

    /// Everything except timings; identical for identical spec and data.
    pub fn render_deterministic(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# ref-occ benchmark report").unwrap();
        writeln!(out, "# format_version: {FORMAT_VERSION}").unwrap();
        writeln!(out, "# spec_sha256: {}", self.spec_hash).unwrap();
        writeln!(out, "# seed: {}", self.seed).unwrap();
        for (k, v) in &self.header {
            writeln!(out, "# {k}: {v}").unwrap();
        }

        writeln!(out, "section,task,classifier,mean,std,runs").unwrap();
        for s in self.summaries() {
            writeln!(
                out,
                "summary,{},{},{:.1},{:.1},{}",
                s.task,
                s.classifier.name(),
                s.mean,
                s.std,
                s.runs
            )
            .unwrap();
        }
        for classifier in [Classifier::Ref, Classifier::Base] {
            if let Some((mean, std)) = self.average(classifier) {
                writeln!(
                    out,
                    "summary,{AVERAGE_ROW},{},{mean:.1},{std:.1},{}",
                    classifier.name(),
                    self.tasks.len()
                )
                .unwrap();
            }
        }

        writeln!(out).unwrap();
        writeln!(
            out,
            "section,task,classifier,repetition,seed,threshold,tp,fn,tn,fp,gmean"
        )
        .unwrap();
        for r in &self.runs {
            let c = r.counts;
            writeln!(
                out,
                "run,{},{},{},{},{},{},{},{},{},{}",
                r.task,
                r.classifier.name(),
                r.repetition,
                r.seed,
                r.threshold,
                c.tp,
                c.fn_,
                c.tn,
                c.fp,
                r.gmean
            )
            .unwrap();
        }
        out
    }

    /// Wall-clock seconds per run. Not reproducible.
    pub fn render_timings(&self) -> String {
        let mut out = String::from("# timings: wall clock, not deterministic\n");
        out.push_str("section,task,classifier,repetition,seconds\n");
        for r in &self.runs {
            writeln!(
                out,
                "timing,{},{},{},{:.6}",
                r.task,
                r.classifier.name(),
                r.repetition,
                r.seconds
            )
            .unwrap();
        }
        out
    }

    pub fn render(&self) -> String {
        format!("{}\n{}", self.render_deterministic(), self.render_timings())
    }
}

/// Mean and sample standard deviation (divisor `n - 1`; 0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Splits a rendered report at the timings section.
pub fn deterministic_part(rendered: &str) -> &str {
    match rendered.find("# timings:") {
        Some(i) => &rendered[..i],
        None => rendered,
    }
}
