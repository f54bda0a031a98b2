//! Command-line front end: `train`, `eval`, `predict`, `inspect`, `synth`.
//!
//! Every command accepts `--config <file>` with `key = value` lines naming the
//! same long flags; flags given on the command line win over the file.

mod commands;
pub mod config;
pub mod synth;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::lvq::{InitStrategy, Mode};
use config::{entries_to_args, read_config, DataKind, Preset, Protocol};

pub use commands::{resolve_train, EvalKind, RunConfig};

/// Environment variable consulted when `--threads` is not given.
pub const THREADS_ENV: &str = "GRLGQ_THREADS";

#[derive(Debug, Parser)]
#[command(name = "grlgq", version, about = "Prototype learning on the Grassmann manifold")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model and write it with its epoch log and run summary
    Train(TrainArgs),
    /// Report accuracy of a model on a labeled dataset
    Eval(EvalArgs),
    /// Classify one image set or one image
    Predict(PredictArgs),
    /// Export relevances, prototype images and distance matrices
    Inspect(InspectArgs),
    /// Generate the synthetic image-set benchmark
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct TrainArgs {
    /// Run file with `key = value` lines
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Hyperparameter defaults of a benchmark task
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// glgq or grlgq
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long, value_enum)]
    pub data: Option<DataKind>,
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Subspace dimension
    #[arg(long = "d")]
    pub d: Option<usize>,
    /// Images per sampled subspace (single-image data)
    #[arg(long = "m")]
    pub m: Option<usize>,
    /// Sampled subspaces per class (single-image data)
    #[arg(long)]
    pub sets_per_class: Option<usize>,
    /// Prototype learning rate
    #[arg(long)]
    pub eta: Option<f64>,
    /// Relevance learning rate
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// random-orthonormal, random-example or class-pca
    #[arg(long)]
    pub init: Option<InitStrategy>,
    #[arg(long)]
    pub prototypes_per_class: Option<usize>,
    /// Evaluation protocol run before the final fit
    #[arg(long, value_enum)]
    pub protocol: Option<Protocol>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub train_per_class: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct EvalArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub data: Option<DataKind>,
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Classify single vectors (θ₁ distance) or subspaces
    #[arg(long, value_enum)]
    pub kind: Option<EvalKind>,
    #[arg(long = "m")]
    pub m: Option<usize>,
    #[arg(long)]
    pub sets_per_class: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Confusion matrix CSV
    #[arg(long)]
    pub confusion: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct PredictArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Directory of `*.pgm` frames forming one image set
    #[arg(long)]
    pub set: Option<PathBuf>,
    /// One PGM image
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Write pixel-influence maps and the image-contribution matrix
    #[arg(long)]
    pub explain: bool,
    #[arg(long)]
    pub explain_dir: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct InspectArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Image width for prototype PGMs (default: square images)
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    /// Dataset for the distance matrix
    #[arg(long, value_enum)]
    pub data: Option<DataKind>,
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    #[arg(long = "m")]
    pub m: Option<usize>,
    #[arg(long)]
    pub sets_per_class: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct SynthArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub classes: Option<usize>,
    #[arg(long)]
    pub ambient_dim: Option<usize>,
    /// Dimension of each class subspace
    #[arg(long)]
    pub dim: Option<usize>,
    /// Training sets per class
    #[arg(long)]
    pub sets_per_class: Option<usize>,
    /// Test sets per class (default: same as training)
    #[arg(long)]
    pub test_sets_per_class: Option<usize>,
    #[arg(long)]
    pub frames_per_set: Option<usize>,
    /// Standard deviation of the additive pixel noise
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Frame width (default: ambient-dim, one row per frame)
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Command {
    fn config_path(&self) -> Option<&PathBuf> {
        match self {
            Command::Train(a) => a.config.as_ref(),
            Command::Eval(a) => a.config.as_ref(),
            Command::Predict(a) => a.config.as_ref(),
            Command::Inspect(a) => a.config.as_ref(),
            Command::Synth(a) => a.config.as_ref(),
        }
    }

    fn threads(&self) -> Option<usize> {
        match self {
            Command::Train(a) => a.threads,
            Command::Eval(a) => a.threads,
            Command::Predict(a) => a.threads,
            Command::Inspect(a) => a.threads,
            Command::Synth(a) => a.threads,
        }
    }
}

fn first_line(e: &clap::Error) -> String {
    let text = e.to_string();
    let line = text.lines().next().unwrap_or("").trim();
    line.strip_prefix("error: ").unwrap_or(line).to_string()
}

enum Parsed {
    Run(Cli),
    /// `--help` or `--version` text
    Display(String),
}

fn parse_error(e: clap::Error, from_file: bool) -> Result<Parsed> {
    use clap::error::ErrorKind;
    if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
        return Ok(Parsed::Display(e.to_string()));
    }
    Err(if from_file {
        Error::Config(format!("in config file: {}", first_line(&e)))
    } else {
        Error::Usage(first_line(&e))
    })
}

/// Parses argv, folding in the `--config` file. File entries are inserted
/// before the command-line flags so that the flags win.
fn parse_argv(argv: Vec<OsString>) -> Result<Parsed> {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => return parse_error(e, false),
    };
    let Some(path) = cli.command.config_path().cloned() else {
        return Ok(Parsed::Run(cli));
    };
    let entries = read_config(&path)?;
    let mut merged: Vec<OsString> = argv[..2].to_vec();
    merged.extend(entries_to_args(&entries));
    merged.extend_from_slice(&argv[2..]);
    match Cli::try_parse_from(&merged) {
        Ok(cli) => Ok(Parsed::Run(cli)),
        Err(e) => parse_error(e, true),
    }
}

fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))
        }),
        Err(_) => Ok(1),
    }
}

/// Runs one command, writing its data output to `out`. `--help` and
/// `--version` are written to `out` as well.
pub fn execute<I, T>(argv: I, out: &mut (dyn Write + Send)) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match parse_argv(argv)? {
        Parsed::Run(cli) => cli,
        Parsed::Display(text) => {
            return out
                .write_all(text.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))
        }
    };
    let threads = match cli.command.threads() {
        Some(n) => n,
        None => threads_from_env()?,
    };
    if threads == 0 {
        return Err(Error::Config("threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(|| commands::dispatch(cli.command, out))
}

/// One-line diagnostic: `error: category=<Category> message="<text>"`.
pub fn format_error(e: &Error) -> String {
    format!("error: category={} message={:?}", e.category(), e.to_string())
}

/// Entry point of the `grlgq` binary; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let mut stdout = std::io::stdout();
    match execute(argv, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", format_error(&e));
            if matches!(e, Error::Usage(_)) {
                2
            } else {
                1
            }
        }
    }
}
