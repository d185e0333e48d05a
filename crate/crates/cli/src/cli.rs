//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "sparsir", version, about = "Sparse sliced inverse regression experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Default, Args)]
pub struct Common {
    /// TOML configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (created if missing)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Clone, Debug, Default, Args)]
pub struct SdpFlags {
    #[arg(long)]
    pub lambda: Option<f64>,
    /// splitting or conditional-gradient
    #[arg(long)]
    pub backend: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a synthetic dataset
    Simulate(SimulateArgs),
    /// Success rate over a grid of rescaled sample sizes
    Curve(CurveArgs),
    /// Sliced-stability diagnostic
    Diagnose(DiagnoseArgs),
    /// Rank the columns of a CSV table
    Recover(RecoverArgs),
    /// Solve the penalized SDP for a matrix read from CSV
    #[command(name = "sdp-solve")]
    SdpSolve(SdpSolveArgs),
}

#[derive(Clone, Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub noise_sd: Option<f64>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    /// fixed or uniform
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Clone, Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub noise_sd: Option<f64>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub beta: Option<String>,
    /// dt-sir or sdp
    #[arg(long)]
    pub method: Option<String>,
    /// raw, centered or whitened
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long = "H")]
    pub h: Option<usize>,
    /// Comma-separated, strictly increasing
    #[arg(long, value_delimiter = ',')]
    pub gamma_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[command(flatten)]
    pub sdp: SdpFlags,
}

#[derive(Clone, Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated model names
    #[arg(long, value_delimiter = ',')]
    pub model: Option<Vec<String>>,
    #[arg(long)]
    pub noise_sd: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub h_grid: Option<Vec<usize>>,
    #[arg(long)]
    pub mc_n: Option<usize>,
}

#[derive(Clone, Debug, Args)]
pub struct RecoverArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub y_column: Option<String>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long = "H")]
    pub h: Option<usize>,
    #[arg(long)]
    pub method: Option<String>,
    #[command(flatten)]
    pub sdp: SdpFlags,
}

#[derive(Clone, Debug, Args)]
pub struct SdpSolveArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Sparsity for sign recovery and the default penalty
    #[arg(long)]
    pub s: Option<usize>,
    #[command(flatten)]
    pub sdp: SdpFlags,
}
