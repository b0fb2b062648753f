use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod output;

#[derive(Debug, Parser)]
#[command(
    name = "som",
    about = "Train self-organising maps, inspect them, and flag anomalous feature vectors",
    disable_version_flag = true,
    arg_required_else_help = true
)]
struct Cli {
    /// Print the tool version and the format versions of persisted artifacts
    #[arg(short = 'V', long)]
    version: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a map on CSV feature data
    Train(TrainArgs),
    /// Compute and export the U-Matrix of a trained map
    Umatrix(UmatrixArgs),
    /// Calibrate a baseline and score feature vectors
    Detect(DetectArgs),
    /// Score labelled data and report detection metrics
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct CsvArgs {
    /// Input has no header line
    #[arg(long)]
    no_header: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    input: PathBuf,
    /// Map file to write; the normaliser goes to `<out>.norm`
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    rows: usize,
    #[arg(long, default_value_t = 10)]
    cols: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// minmax, zscore or none
    #[arg(long, default_value = "minmax")]
    normalize: String,
    /// Label column; when given, only rows labelled normal are trained on
    #[arg(long)]
    label_column: Option<String>,
    /// Total adaptation steps [default: 500 per map unit]
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    ordering_steps: Option<u64>,
    #[arg(long)]
    alpha_start: Option<f64>,
    #[arg(long)]
    alpha_mid: Option<f64>,
    #[arg(long)]
    alpha_end: Option<f64>,
    #[arg(long)]
    sigma_start: Option<f64>,
    #[arg(long)]
    sigma_end: Option<f64>,
    /// Sample quantisation error every N steps (0: start and end only)
    #[arg(long, default_value_t = 1000)]
    qe_every: u64,
    /// Stop once the sampled quantisation error drops below this value
    #[arg(long)]
    early_stop_qe: Option<f64>,
    /// Skip nodes further than this many neighbourhood widths from the winner
    #[arg(long)]
    cutoff_sigmas: Option<f64>,
    /// Train/calibrate/test fractions, e.g. 0.8,0.1,0.1; held-out parts are
    /// written next to the map as `<out>.calibrate.csv` and `<out>.test.csv`
    #[arg(long)]
    split: Option<String>,
    /// Also write the training report to this file
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    csv: CsvArgs,
}

#[derive(Debug, Args)]
pub struct UmatrixArgs {
    #[arg(long)]
    map: PathBuf,
    /// grid-csv or grayscale-image; repeat together with --out for several exports
    #[arg(long, required = true)]
    format: Vec<String>,
    #[arg(long, required = true)]
    out: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(long)]
    map: PathBuf,
    /// Calibration data [default: `<map>.calibrate.csv` written by `train --split`]
    #[arg(long)]
    calibrate: Option<PathBuf>,
    #[arg(long, default_value_t = 99.0)]
    percentile: f64,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    baseline: BaselineArgs,
    /// Feature vectors to score
    #[arg(long)]
    input: PathBuf,
    /// Verdict CSV to write
    #[arg(long)]
    out: PathBuf,
    /// Label column to ignore in the input and calibration files
    #[arg(long)]
    label_column: Option<String>,
    #[command(flatten)]
    csv: CsvArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    baseline: BaselineArgs,
    /// Labelled feature vectors
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "label")]
    label_column: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.version {
        print!("{}", commands::version_text());
        return ExitCode::SUCCESS;
    }
    let result = match cli.command {
        Some(Command::Train(a)) => commands::run_train(&a),
        Some(Command::Umatrix(a)) => commands::run_umatrix(&a),
        Some(Command::Detect(a)) => commands::run_detect(&a),
        Some(Command::Eval(a)) => commands::run_eval(&a),
        None => {
            eprintln!("error: no command given (see --help)");
            return ExitCode::from(2);
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
