//! `ref-occ`: train, apply and benchmark REF one-class classifiers.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ref_occ::bench::{
    all_curves, learning_curve, render_probe, run_benchmark, timing_probe, BenchContext, BenchSpec,
};
use ref_occ::data::{load_dataset, ColumnRef, Dataset, DatasetSchema};
use ref_occ::model::label_for;
use ref_occ::model_file::{load_model, save_model};
use ref_occ::registry::{Registry, DATA_DIR_ENV};
use ref_occ::{gmean, ConfusionCounts, DistanceMetric, Error, FoldOp, Result};

#[derive(Parser, Debug)]
#[command(
    name = "ref-occ",
    version,
    about = "One-class classification by repeated element-wise folding"
)]
struct Cli {
    /// Directory holding the registered benchmark datasets
    #[arg(long, global = true, env = DATA_DIR_ENV, default_value = "data")]
    data_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a model on a dataset (optionally only the rows of one class)
    Train(TrainArgs),
    /// Score every row of a dataset: index, score, label
    Predict(PredictArgs),
    /// Gmean of a model on a labeled dataset, one class taken as the target
    Eval(EvalArgs),
    /// Run a benchmark spec and write its report
    Bench(BenchArgs),
    /// Write the learning curve of one task and repetition of a spec
    Curve(CurveArgs),
    /// Time training on synthetic standard-normal data
    Probe(ProbeArgs),
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Delimited text file, or the name of a registered dataset
    #[arg(long)]
    data: String,
    /// Field delimiter
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Split fields on runs of spaces and tabs
    #[arg(long, default_value_t = false)]
    whitespace: bool,
    /// The first row holds column names
    #[arg(long, default_value_t = false)]
    header: bool,
    /// Label column: index, header name, `last`, or `none`
    #[arg(long, default_value = "last")]
    label_column: String,
    /// Comma-separated feature columns [default: all but the label]
    #[arg(long, value_delimiter = ',')]
    features: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Fit only on rows of this class
    #[arg(long)]
    target_class: Option<String>,
    /// Element-wise fold: abs, sqr, cos-abs, cos, sin, tanh
    #[arg(long, default_value = "abs")]
    fold: FoldOp,
    /// Iterations J (1 gives the base classifier)
    #[arg(long, default_value_t = ref_occ::DEFAULT_ITERATIONS)]
    iters: usize,
    /// Model file to write
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PredictArgs {
    /// Model file
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    data: DataArgs,
    /// Acceptance threshold T (score <= T is a target)
    #[arg(long, default_value_t = ref_occ::DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Distance: l1 or l2 (divided by the dimension)
    #[arg(long, default_value = "l1")]
    dist: DistanceMetric,
    /// Write to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Model file
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    data: DataArgs,
    /// Class treated as the target; all others are outliers
    #[arg(long)]
    target_class: String,
    /// Acceptance threshold T
    #[arg(long, default_value_t = ref_occ::DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Distance: l1 or l2
    #[arg(long, default_value = "l1")]
    dist: DistanceMetric,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Benchmark spec (TOML)
    #[arg(long)]
    spec: PathBuf,
    /// Report file
    #[arg(long, default_value = "bench_report.csv")]
    out: PathBuf,
    /// Worker threads [default: available cores]
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct CurveArgs {
    /// Benchmark spec (TOML) with a fixed threshold
    #[arg(long)]
    spec: PathBuf,
    /// Task name such as Iris2; omit for the average over all tasks and repetitions
    #[arg(long)]
    task: Option<String>,
    /// Repetition, starting at 1
    #[arg(long, default_value_t = 1)]
    rep: usize,
    /// Curve file
    #[arg(long, default_value = "curve.csv")]
    out: PathBuf,
    /// Worker threads for the average curve [default: available cores]
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    /// Comma-separated sample counts
    #[arg(long, value_delimiter = ',', default_value = "10000,20000,40000")]
    sizes: Vec<String>,
    /// Dimension of the synthetic data
    #[arg(long, default_value_t = 20)]
    dim: usize,
    /// Iterations J
    #[arg(long, default_value_t = ref_occ::DEFAULT_ITERATIONS)]
    iters: usize,
    /// Seed of the synthetic data
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Timing table file
    #[arg(long, default_value = "probe.csv")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace(['\n', '\r'], " ");
            eprintln!("error: {}: {}", e.kind(), msg.trim());
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let registry = Registry::builtin(&cli.data_dir);
    match cli.command {
        Command::Train(a) => train(&registry, a),
        Command::Predict(a) => predict(&registry, a),
        Command::Eval(a) => eval(&registry, a),
        Command::Bench(a) => bench(registry, a),
        Command::Curve(a) => curve(registry, a),
        Command::Probe(a) => probe(a),
    }
}

fn load(registry: &Registry, a: &DataArgs) -> Result<Dataset> {
    let path = Path::new(&a.data);
    if !path.exists() && registry.manifest().entry(&a.data).is_some() {
        return registry.load(&a.data);
    }
    let label_column = match a.label_column.as_str() {
        "none" => None,
        s => Some(s.parse::<ColumnRef>()?),
    };
    let feature_columns = a
        .features
        .as_ref()
        .map(|cols| {
            cols.iter()
                .map(|c| c.parse::<ColumnRef>())
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let schema = DatasetSchema {
        delimiter: a.delimiter,
        whitespace: a.whitespace,
        header: a.header,
        label_column,
        feature_columns,
        ..DatasetSchema::default()
    };
    load_dataset(path, &schema)
}

fn class_index(ds: &Dataset, class: &str) -> Result<usize> {
    ds.class_index(class).ok_or_else(|| {
        Error::Config(format!(
            "class '{class}' not in {} (classes: {})",
            ds.name(),
            ds.class_names().join(", ")
        ))
    })
}

fn train(registry: &Registry, a: TrainArgs) -> Result<()> {
    let ds = load(registry, &a.data)?;
    let x = match &a.target_class {
        Some(class) => ds.rows_of_class(class_index(&ds, class)?),
        None => ds.features().clone(),
    };
    let model = ref_occ::RefModel::train(&x, a.iters, a.fold)?;
    save_model(&model, &a.out)?;
    println!("J={} D={} N={}", model.iterations(), model.dim(), x.rows());
    Ok(())
}

fn predict(registry: &Registry, a: PredictArgs) -> Result<()> {
    ref_occ::model::check_threshold(a.threshold)?;
    let model = load_model(&a.model)?;
    let ds = load(registry, &a.data)?;
    let mut out = String::new();
    for (i, row) in ds.features().iter_rows().enumerate() {
        let score = model.score(row, a.dist)?;
        out.push_str(&format!(
            "{i},{score:.16e},{}\n",
            label_for(score, a.threshold)
        ));
    }
    emit(&out, a.out.as_deref())
}

fn eval(registry: &Registry, a: EvalArgs) -> Result<()> {
    ref_occ::model::check_threshold(a.threshold)?;
    let model = load_model(&a.model)?;
    let ds = load(registry, &a.data)?;
    let target = class_index(&ds, &a.target_class)?;
    let scores = model.score_rows(ds.features(), a.dist)?;
    let truth: Vec<bool> = ds.labels().iter().map(|&l| l == target).collect();
    let r = gmean(ConfusionCounts::from_scores(&scores, &truth, a.threshold))?;
    let c = r.counts;
    println!("tp,fn,tn,fp,tpr,tnr,gmean");
    println!(
        "{},{},{},{},{},{},{}",
        c.tp, c.fn_, c.tn, c.fp, r.tpr, r.tnr, r.gmean
    );
    Ok(())
}

fn jobs(requested: Option<usize>) -> usize {
    requested.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn bench(registry: Registry, a: BenchArgs) -> Result<()> {
    let spec = BenchSpec::load(&a.spec)?;
    let ctx = BenchContext {
        registry,
        jobs: jobs(a.jobs),
    };
    let report = run_benchmark(&spec, &ctx)?;
    write_file(&a.out, &report.render())?;
    println!("{}", a.out.display());
    Ok(())
}

fn curve(registry: Registry, a: CurveArgs) -> Result<()> {
    let spec = BenchSpec::load(&a.spec)?;
    spec.validate()?;
    let inputs = spec.resolve(&registry)?;
    let text = match &a.task {
        Some(task) => learning_curve(&spec, &inputs, task, a.rep)?.render(&spec),
        None => all_curves(&spec, &inputs, jobs(a.jobs))?.1.render(&spec),
    };
    write_file(&a.out, &text)?;
    println!("{}", a.out.display());
    Ok(())
}

fn probe(a: ProbeArgs) -> Result<()> {
    let sizes = a
        .sizes
        .iter()
        .map(|s| parse_count(s))
        .collect::<Result<Vec<usize>>>()?;
    let rows = timing_probe(&sizes, a.dim, a.iters, a.seed)?;
    write_file(&a.out, &render_probe(&rows, a.seed))?;
    println!("{}", a.out.display());
    Ok(())
}

/// Accepts plain integers and exponent forms such as `1e4`.
fn parse_count(s: &str) -> Result<usize> {
    let s = s.trim();
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => Ok(v as usize),
        _ => Err(Error::Config(format!("invalid size '{s}'"))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_file(path, text),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}
