//! Command-line front end over the `pcasim` library: dataset comparison,
//! AAD scoring, instability sweeps, and invariance checks.
//!
//! Exit codes: 0 on success, 2 for input problems (files, parsing, schemas,
//! flags), 3 for numerical failures (no convergence, degenerate data). Given
//! identical inputs and seeds, every subcommand writes byte-identical output,
//! whatever `--threads` says.

pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{experiment_table, AadConfig, AadInputs, AadReport, AadSelection, CompareReport};
use pcasim::{
    aad, aad_sweep, compare_opts, instability_sweep, invariance_suite, load_csv, rank_features,
    CategoricalPolicy, DataMatrix, Error, ExperimentResult, FeatureSubset, PreprocessMode,
    PreprocessSpec, RankMethod, Result,
};

#[derive(Debug, Parser)]
#[command(
    name = "pcasim",
    version,
    about = "PCA-based inter-dataset similarity metrics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare two CSV datasets (Δλ, Δθ, plus baseline metrics)
    Compare(CompareArgs),
    /// Score a feature selection by Average Angle Difference
    Aad(AadArgs),
    /// Measure metric stability across sample sizes and dimensions
    Instability(InstabilityArgs),
    /// Run the noise/affine/rotation invariance checks on a dataset
    Invariance(InvarianceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Center,
    Zscore,
    None,
}

impl From<ModeArg> for PreprocessMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Center => PreprocessMode::Center,
            ModeArg::Zscore => PreprocessMode::Zscore,
            ModeArg::None => PreprocessMode::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CategoricalArg {
    /// Encode categories as integers in first-appearance order
    Ordinal,
    /// Drop categorical columns with a warning
    Drop,
    /// Refuse files with categorical columns
    Reject,
}

impl From<CategoricalArg> for CategoricalPolicy {
    fn from(c: CategoricalArg) -> Self {
        match c {
            CategoricalArg::Ordinal => CategoricalPolicy::OrdinalEncode,
            CategoricalArg::Drop => CategoricalPolicy::Drop,
            CategoricalArg::Reject => CategoricalPolicy::Reject,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputOpts {
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    pub format: FormatArg,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads for parallel sections (default: all logical CPUs).
    /// Never changes output values.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// First CSV dataset
    pub path_a: PathBuf,
    /// Second CSV dataset (same header as the first)
    pub path_b: PathBuf,
    /// Column scaling applied before PCA
    #[arg(long, value_enum, default_value_t = ModeArg::Zscore)]
    pub preprocess: ModeArg,
    /// Number of retained components p (default: all d)
    #[arg(long)]
    pub components: Option<usize>,
    /// Handling of categorical columns
    #[arg(long, value_enum, default_value_t = CategoricalArg::Ordinal)]
    pub categorical: CategoricalArg,
    /// Difference raw eigenvalues instead of explained-variance ratios
    #[arg(long)]
    pub raw_spectrum: bool,
    #[command(flatten)]
    pub out: OutputOpts,
}

#[derive(Debug, Args)]
pub struct AadArgs {
    /// CSV dataset
    pub path: PathBuf,
    /// Selected feature indices, e.g. `--selected 0,2,5`
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["order", "k"])]
    pub selected: Option<Vec<usize>>,
    /// Ranking rule: `variance` or `target:<column name or index>`
    #[arg(long)]
    pub order: Option<String>,
    /// Select the first K ranked features; omit to sweep k = 1…d−1
    #[arg(long, requires = "order")]
    pub k: Option<usize>,
    /// Column scaling applied before PCA
    #[arg(long, value_enum, default_value_t = ModeArg::Center)]
    pub preprocess: ModeArg,
    /// Handling of categorical columns
    #[arg(long, value_enum, default_value_t = CategoricalArg::Ordinal)]
    pub categorical: CategoricalArg,
    #[command(flatten)]
    pub out: OutputOpts,
}

#[derive(Debug, Args)]
pub struct InstabilityArgs {
    /// Dataset dimensions to sweep, e.g. `--dims 2,5,10`
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    /// Sample sizes to sweep, e.g. `--sizes 10,100,1000`
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    /// Trials per grid cell
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Master RNG seed
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputOpts,
}

#[derive(Debug, Args)]
pub struct InvarianceArgs {
    /// CSV dataset
    pub path: PathBuf,
    /// Noise scale η for the perturbation row
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
    /// Rotation angle in degrees, in (0, 90]
    #[arg(long, default_value_t = 45.0)]
    pub rotate: f64,
    /// Master RNG seed
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Handling of categorical columns
    #[arg(long, value_enum, default_value_t = CategoricalArg::Ordinal)]
    pub categorical: CategoricalArg,
    #[command(flatten)]
    pub out: OutputOpts,
}

#[cfg(feature = "parallel")]
fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<R>(threads: Option<usize>, f: impl FnOnce() -> R) -> R {
    if threads.is_some() {
        log::warn!("built without the `parallel` feature; --threads is ignored");
    }
    f()
}

fn emit(content: String, out: &OutputOpts) -> Result<()> {
    match &out.output {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn emit_experiment(result: &ExperimentResult, out: &OutputOpts) -> Result<()> {
    let content = match out.format {
        FormatArg::Json => {
            let mut s = result.to_json_string();
            s.push('\n');
            s
        }
        FormatArg::Csv => result.to_csv_string(),
        FormatArg::Table => experiment_table(result),
    };
    emit(content, out)
}

/// Resolves a `target:<col>` reference against the dataset's columns, by
/// index first, then by name.
fn resolve_column(data: &DataMatrix, reference: &str) -> Result<usize> {
    if let Ok(index) = reference.parse::<usize>() {
        if index >= data.n_cols() {
            return Err(Error::IndexOutOfRange {
                index,
                dim: data.n_cols(),
            });
        }
        return Ok(index);
    }
    data.col_names()
        .iter()
        .position(|name| name == reference)
        .ok_or_else(|| Error::InvalidArgument(format!("no column named `{reference}`")))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compare(args) => run_compare(args),
        Command::Aad(args) => run_aad(args),
        Command::Instability(args) => run_instability(args),
        Command::Invariance(args) => run_invariance(args),
    }
}

fn run_compare(args: CompareArgs) -> Result<()> {
    let spec = PreprocessSpec {
        mode: args.preprocess.into(),
        categorical: args.categorical.into(),
    };
    let a = load_csv(&args.path_a, &spec)?;
    let b = load_csv(&args.path_b, &spec)?;
    let p = args.components.unwrap_or(a.n_cols());
    let report = with_threads(args.out.threads, || {
        compare_opts(&a, &b, &spec, p, args.raw_spectrum)
    })?;
    let full = CompareReport::from_metric_report(
        &report,
        &args.path_a.display().to_string(),
        &args.path_b.display().to_string(),
    );
    let content = match args.out.format {
        FormatArg::Json => full.to_json(),
        FormatArg::Csv => full.to_csv(),
        FormatArg::Table => full.to_table(),
    };
    emit(content, &args.out)
}

fn run_aad(args: AadArgs) -> Result<()> {
    let spec = PreprocessSpec {
        mode: args.preprocess.into(),
        categorical: args.categorical.into(),
    };
    let data = load_csv(&args.path, &spec)?;
    let d = data.n_cols();

    let selection: Option<Vec<usize>> = match (&args.selected, &args.order) {
        (Some(indices), None) => Some(indices.clone()),
        (None, Some(order)) => {
            let method = match order.as_str() {
                "variance" => RankMethod::Variance,
                other => match other.strip_prefix("target:") {
                    Some(reference) => {
                        RankMethod::AbsCorrToTarget(resolve_column(&data, reference)?)
                    }
                    None => {
                        return Err(Error::InvalidArgument(format!(
                            "unknown ordering `{other}`; use `variance` or `target:<col>`"
                        )))
                    }
                },
            };
            let ordering = rank_features(&data, method)?;
            match args.k {
                Some(k) => {
                    if k == 0 || k > d {
                        return Err(Error::InvalidArgument(format!(
                            "k = {k} must lie in 1..={d}"
                        )));
                    }
                    Some(ordering[..k].to_vec())
                }
                None => {
                    // Full sweep over k = 1…d−1.
                    let result =
                        with_threads(args.out.threads, || aad_sweep(&data, &ordering, &spec))?;
                    return emit_experiment(&result, &args.out);
                }
            }
        }
        _ => {
            return Err(Error::InvalidArgument(
                "exactly one of --selected or --order is required".into(),
            ))
        }
    };

    let selected = selection.expect("checked above");
    let subset = FeatureSubset::new(d, selected)?;
    let value = with_threads(args.out.threads, || aad(&data, &subset, &spec))?;
    let report = AadReport {
        aad: value,
        selection: AadSelection {
            selected: subset.selected().to_vec(),
            complement: subset.complement(),
        },
        config: AadConfig {
            preprocess: spec.mode.to_string(),
            categorical: spec.categorical.to_string(),
        },
        inputs: AadInputs {
            path: args.path.display().to_string(),
            n: data.n_rows(),
            d,
        },
    };
    let content = match args.out.format {
        FormatArg::Json => report.to_json(),
        FormatArg::Csv => report.to_csv(),
        FormatArg::Table => report.to_table(),
    };
    emit(content, &args.out)
}

fn run_instability(args: InstabilityArgs) -> Result<()> {
    let result = with_threads(args.out.threads, || {
        instability_sweep(&args.dims, &args.sizes, args.trials, args.seed)
    })?;
    emit_experiment(&result, &args.out)
}

fn run_invariance(args: InvarianceArgs) -> Result<()> {
    let spec = PreprocessSpec {
        mode: PreprocessMode::Center,
        categorical: args.categorical.into(),
    };
    let data = load_csv(&args.path, &spec)?;
    let result = with_threads(args.out.threads, || {
        invariance_suite(&data, args.noise, args.rotate, args.seed)
    })?;
    emit_experiment(&result, &args.out)
}
