//! `pronylab`: reproducible batch runs over the stability laboratory.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "pronylab", version, about = "Stability laboratory for super-resolution")]
pub struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Omit timestamps and absolute paths from outputs.
    #[arg(long, global = true)]
    pub deterministic: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trigonometric moments of a measure file.
    Moments(MomentsArgs),
    /// Monte-Carlo certification of one inequality.
    Check(CheckArgs),
    /// Samples of ψ and ψ̂ for plotting.
    PsiSample(PsiArgs),
    /// ESPRIT recovery from a univariate moment file.
    Esprit(EspritArgs),
    /// Complex 1-Wasserstein distance between two measure files.
    W1(W1Args),
    /// Pair-cluster Vandermonde bound for a node set.
    Vandermonde(VandermondeArgs),
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// Measure JSON.
    #[arg(long)]
    pub measure: PathBuf,
    #[arg(long)]
    pub n: Option<u32>,
    /// Frequency ball: l2 or linf.
    #[arg(long)]
    pub norm: Option<String>,
    /// Output CSV (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// univariate, diederichs1d, 2d-l2, 2d-linf, highd, global-w1, md-order, esprit or vandermonde-pairs.
    #[arg(long)]
    pub theorem: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed_start: Option<u64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub m_max: Option<usize>,
    #[arg(long)]
    pub c_min: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub jitter_min: Option<f64>,
    #[arg(long)]
    pub jitter_max: Option<f64>,
    /// Directory for `<theorem>.jsonl` and `<theorem>.csv`.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PsiArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Support parameter; defaults to √d/N.
    #[arg(long)]
    pub q: Option<f64>,
    /// hann, parabolic or plain-cosine.
    #[arg(long)]
    pub window: Option<String>,
    /// Samples per axis (or per line for d ≥ 3), at most 2001.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Half-width of the spatial window; defaults to 1.25 q.
    #[arg(long)]
    pub extent: Option<f64>,
    /// Half-width of the frequency window; defaults to 2N.
    #[arg(long)]
    pub freq_extent: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EspritArgs {
    /// Univariate moment CSV.
    #[arg(long)]
    pub moments: PathBuf,
    /// Number of nodes.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub pencil_rows: Option<usize>,
    /// Ground-truth measure; enables the stability report.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Output measure JSON (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct W1Args {
    #[arg(long)]
    pub mu1: PathBuf,
    #[arg(long)]
    pub mu2: PathBuf,
    /// Initial angle grid.
    #[arg(long)]
    pub angles: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VandermondeArgs {
    /// Measure JSON whose nodes are analysed; otherwise a random configuration is drawn.
    #[arg(long)]
    pub nodes: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub pairs: Option<usize>,
    #[arg(long)]
    pub singles: Option<usize>,
    /// Intra-pair distance of generated clusters.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("PRONYLAB_THREADS") else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("PRONYLAB_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match init_threads().and_then(|()| commands::run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
