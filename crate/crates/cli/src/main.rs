use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spectral_vote::commands::{self, evaluate::EvalConfig, BatchSummary};
use spectral_vote::config::{resolve_seed, RunConfig};
use spectral_vote::{fixtures, CliError};

#[derive(Parser)]
#[command(
    name = "spectral-vote",
    version,
    about = "Label-free salient masks from self-supervised feature maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral clustering of every (source, k) pair; writes one PGM per cluster.
    Cluster(BatchArgs),
    /// Candidate generation, framing filter and voting; writes one pseudo-mask per image.
    PseudoLabel {
        #[command(flatten)]
        batch: BatchArgs,
        /// Also write the mask resized (nearest) to HEIGHT WIDTH.
        #[arg(long, num_args = 2, value_names = ["HEIGHT", "WIDTH"])]
        upsample: Option<Vec<usize>>,
        /// Directory of <id>.pgm / <id>.png reference masks; adds reference_iou to sidecars.
        #[arg(long, value_name = "DIR")]
        gt: Option<PathBuf>,
    },
    /// IoU, accuracy and max-F-beta of predictions against ground truth, matched by file stem.
    Evaluate {
        #[arg(long, value_name = "DIR")]
        pred: PathBuf,
        #[arg(long, value_name = "DIR")]
        gt: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Also write evaluation.csv.
        #[arg(long)]
        csv: bool,
        /// Score matched pairs even when some files have no counterpart.
        #[arg(long)]
        allow_missing: bool,
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
    },
    /// Finite-difference check of the loss gradients.
    LossCheck {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, hide = true, value_name = "DELTA")]
        inject_fault: Option<f64>,
    },
    /// Write a synthetic planted-blob dataset (features, manifest, ground truth).
    MakeFixture {
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, default_value_t = 4)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct BatchArgs {
    /// JSON manifest listing images and their feature files.
    #[arg(long)]
    manifest: PathBuf,
    /// Comma-separated feature sources (default: all sources in the manifest).
    #[arg(long, value_delimiter = ',')]
    sources: Option<Vec<String>>,
    /// Comma-separated cluster counts.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    ks: Vec<usize>,
    /// Root seed; falls back to SPECTRAL_VOTE_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    /// Process every image even after a failure (exit status is still nonzero).
    #[arg(long)]
    keep_going: bool,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl BatchArgs {
    fn into_config(self) -> Result<RunConfig, CliError> {
        Ok(RunConfig {
            manifest: self.manifest,
            sources: self.sources,
            ks: self.ks,
            seed: resolve_seed(self.seed)?,
            out: self.out,
            gt_dir: None,
            workers: self.workers,
            upsample: None,
            keep_going: self.keep_going,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let report = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{report}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Cluster(batch) => Ok(finish(commands::cluster::run(&batch.into_config()?)?)),
        Command::PseudoLabel { batch, upsample, gt } => {
            let mut config = batch.into_config()?;
            config.upsample = upsample.map(|v| (v[0], v[1]));
            config.gt_dir = gt;
            Ok(finish(commands::pseudo_label::run(&config)?))
        }
        Command::Evaluate { pred, gt, out, csv, allow_missing, workers } => {
            let e = commands::evaluate::run(&EvalConfig { pred, gt, out, csv, allow_missing, workers })?;
            eprintln!(
                "images {}  mean IoU {:.4}  mean accuracy {:.4}  mean max-F {:.4}",
                e.count, e.mean_iou, e.mean_accuracy, e.mean_max_f_beta
            );
            if !e.complete() {
                eprintln!(
                    "unmatched: {} ground truth without prediction, {} predictions without ground truth",
                    e.missing_predictions.len(),
                    e.missing_ground_truth.len()
                );
            }
            Ok(e.exit_code(allow_missing))
        }
        Command::LossCheck { seed, trials, inject_fault } => {
            let report = commands::loss_check::run(resolve_seed(seed)?, trials, inject_fault)?;
            print!("{}", commands::loss_check::format_report(&report));
            Ok(if report.passed() { 0 } else { spectral_vote::error::EXIT_INTERNAL })
        }
        Command::MakeFixture { out, count, seed } => {
            let manifest = fixtures::write_planted_dataset(&out, count, resolve_seed(seed)?)?;
            eprintln!("wrote {}", manifest.display());
            Ok(0)
        }
    }
}

fn finish(summary: BatchSummary) -> i32 {
    if !summary.succeeded() {
        if let Ok(text) = serde_json::to_string(&summary) {
            eprintln!("{text}");
        }
    }
    summary.exit_code()
}
