//! Command-line front end for the screener planning model.
//!
//! [`run`] parses arguments, executes one command and returns the exit code
//! with everything that would go to stdout and stderr, so the binary and the
//! tests share one code path.

use clap::{Args, Parser, Subcommand, ValueEnum};
use pipegate::catalog::{builtin_catalog, load_catalog, Catalog, CatalogError, CatalogWarning};
use pipegate::simulate::PrecisionMode;
use pipegate::ModelError;
use std::ffi::OsString;
use std::path::PathBuf;
use thiserror::Error;

mod commands;
pub mod output;
mod reproduce;

pub use output::{Format, OutputRecord};

pub mod exit {
    pub const OK: i32 = 0;
    /// A reproduction check or a simulated verdict disagreed with expectations.
    pub const REGRESSION: i32 = 1;
    pub const UNKNOWN_ENTITY: i32 = 2;
    pub const INVALID_INPUT: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(
    name = "pipegate",
    version,
    about = "Decide whether an ML screener in front of a patch validator pays off"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// Catalog file replacing the built-in detector table.
    #[arg(long, env = "PIPEGATE_CATALOG", global = true)]
    pub catalog: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Screener precision, recall and FPR of a detector used with flipped labels.
    Invert(InvertArgs),
    /// Minimum extra candidates and latency bounds for one screener.
    Bounds(BoundsArgs),
    /// Latency budget of every catalog model against benchmark validator times.
    Limits(LimitsArgs),
    /// Monte Carlo run of both pipelines next to the closed forms.
    Simulate(SimulateArgs),
    /// Recompute the published figures and check them against tolerances.
    Reproduce,
}

/// A detector named in the catalog, a single-model catalog file, or metrics
/// given inline.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Catalog model name or path to a single-model catalog file.
    #[arg(long, short)]
    pub model: Option<String>,
    /// Detector precision (inline model).
    #[arg(long, conflicts_with = "model", requires_all = ["recall", "eval_prevalence"])]
    pub precision: Option<f64>,
    /// Detector recall (inline model).
    #[arg(long, conflicts_with = "model", requires = "precision")]
    pub recall: Option<f64>,
    /// Detector FPR (inline model); Bayes-estimated when omitted.
    #[arg(long, conflicts_with = "model", requires = "precision")]
    pub fpr: Option<f64>,
    /// Prevalence of the detector's evaluation set (inline model).
    #[arg(long, conflicts_with = "model", requires = "precision")]
    pub eval_prevalence: Option<f64>,
    /// Detector latency in seconds (inline model).
    #[arg(long, conflicts_with = "model", requires = "precision")]
    pub latency: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    AsPublished,
    PrevalenceConsistent,
}

impl From<Mode> for PrecisionMode {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::AsPublished => PrecisionMode::AsPublished,
            Mode::PrevalenceConsistent => PrecisionMode::PrevalenceConsistent,
        }
    }
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Prevalence for the prevalence-consistent precision [default: benchmark].
    #[arg(long)]
    pub pi: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Share of good patches among candidates [default: benchmark].
    #[arg(long)]
    pub pi: Option<f64>,
    /// Screener latency in seconds [default: the model's latency].
    #[arg(long)]
    pub tau_m: Option<f64>,
    /// Validator latency in seconds.
    #[arg(long)]
    pub tau_v: Option<f64>,
    /// Extra candidates as a share of n [default: the minimum].
    #[arg(long)]
    pub delta_ratio: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub validator_recall: f64,
    /// Baseline candidate count for the verdict totals.
    #[arg(long, default_value_t = 1.0)]
    pub n: f64,
    #[arg(long, value_enum, default_value_t = Mode::AsPublished)]
    pub precision_mode: Mode,
}

#[derive(Debug, Args)]
pub struct LimitsArgs {
    /// Share of good patches among candidates [default: benchmark].
    #[arg(long)]
    pub pi: Option<f64>,
    /// `builtin` or a catalog file with a benchmark section.
    #[arg(long, default_value = "builtin")]
    pub benchmark: String,
    #[arg(long, value_enum, default_value_t = Mode::AsPublished)]
    pub precision_mode: Mode,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Screener true-positive rate, instead of a detector.
    #[arg(long, requires = "screener_fpr", conflicts_with_all = ["model", "precision"])]
    pub screener_tpr: Option<f64>,
    #[arg(long, requires = "screener_tpr")]
    pub screener_fpr: Option<f64>,
    /// Share of good patches among candidates [default: benchmark].
    #[arg(long)]
    pub pi: Option<f64>,
    #[arg(long, default_value_t = pipegate::simulate::DEFAULT_N)]
    pub n: u64,
    /// Extra candidates as a share of n.
    #[arg(long, conflicts_with = "extra")]
    pub delta_ratio: Option<f64>,
    /// Extra candidates as a count.
    #[arg(long)]
    pub extra: Option<u64>,
    /// Screener latency in seconds [default: the model's latency].
    #[arg(long)]
    pub tau_m: Option<f64>,
    #[arg(long)]
    pub tau_v: f64,
    #[arg(long, default_value_t = 1.0)]
    pub validator_recall: f64,
    #[arg(long, default_value_t = 0.0)]
    pub validator_fpr: f64,
    #[arg(long, default_value_t = pipegate::simulate::DEFAULT_TRIALS)]
    pub trials: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on it [default: all cores].
    #[arg(long)]
    pub workers: Option<usize>,
    /// [default: as-published for catalog models, prevalence-consistent for raw rates]
    #[arg(long, value_enum)]
    pub precision_mode: Option<Mode>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown model {name:?}; known models: {known}")]
    UnknownModel { name: String, known: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownModel { .. } => exit::UNKNOWN_ENTITY,
            _ => exit::INVALID_INPUT,
        }
    }
}

/// Resolved catalog plus the consistency warnings that came with it.
pub(crate) struct Context {
    pub catalog: Catalog,
    pub user_catalog: bool,
    pub warnings: Vec<CatalogWarning>,
}

impl Context {
    fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        match path {
            Some(path) => {
                let (mut catalog, warnings) = load_catalog(path)?;
                if catalog.benchmark.is_none() {
                    catalog.benchmark = builtin_catalog().benchmark;
                }
                Ok(Context {
                    catalog,
                    user_catalog: true,
                    warnings,
                })
            }
            None => {
                let catalog = builtin_catalog();
                let warnings = catalog.warnings();
                Ok(Context {
                    catalog,
                    user_catalog: false,
                    warnings,
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let text = err.render().to_string();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: exit::OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: exit::INVALID_INPUT,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match execute(&cli) {
        Ok(record) => {
            let code = match record.status {
                output::Status::Ok => exit::OK,
                output::Status::Regression => exit::REGRESSION,
            };
            // CSV stays a bare table; warnings go to stderr there.
            let stderr = if cli.format == Format::Csv {
                record.warnings.iter().map(|w| format!("warning: {w}\n")).collect()
            } else {
                String::new()
            };
            Outcome {
                code,
                stdout: record.render(cli.format),
                stderr,
            }
        }
        Err(err) => Outcome {
            code: err.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
        },
    }
}

/// Executes a parsed command.
pub fn execute(cli: &Cli) -> Result<OutputRecord, CliError> {
    if let Command::Reproduce = cli.command {
        return reproduce::reproduce();
    }
    let ctx = Context::load(cli.catalog.as_ref())?;
    match &cli.command {
        Command::Invert(args) => commands::invert(&ctx, args),
        Command::Bounds(args) => commands::bounds(&ctx, args),
        Command::Limits(args) => commands::limits(&ctx, args),
        Command::Simulate(args) => commands::simulate(&ctx, args),
        Command::Reproduce => unreachable!("handled above"),
    }
}
