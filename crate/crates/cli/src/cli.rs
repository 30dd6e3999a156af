use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use speed_core::protocol::{HeMode, NoiseMode};

#[derive(Debug, Parser)]
#[command(
    name = "speed",
    version,
    about = "Private collaborative labeling: simulation and privacy accounting"
)]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,

    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML config file with flat keys and an optional [heargmax] section.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Vote histogram file (JSON, or CSV with one query per row).
    #[arg(long, global = true, value_name = "FILE")]
    pub votes: Option<PathBuf>,
    /// Inverse noise scale.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Fraction of teachers assumed not to collude.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Largest moment order.
    #[arg(long, global = true)]
    pub lmax: Option<usize>,
    #[arg(long, global = true)]
    pub teachers: Option<usize>,
    #[arg(long, global = true)]
    pub classes: Option<usize>,
    #[arg(long, global = true)]
    pub queries: Option<usize>,
    /// distributed, centralised or no-noise.
    #[arg(long, global = true, value_parser = kebab::<NoiseMode>)]
    pub mode: Option<NoiseMode>,
    /// off, ideal or noisy.
    #[arg(long, global = true, value_parser = kebab::<HeMode>)]
    pub he: Option<HeMode>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory. Without it the main artifact goes to stdout.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Privacy guarantee of a labeling session from its vote histogram.
    Accountant,
    /// Runs a simulated labeling session and accounts for it.
    Simulate,
    /// Epsilon over a grid of gamma or tau values.
    Sweep(SweepArgs),
    /// Compares summed noise shares with the centralised Laplace noise.
    DistCheck(DistCheckArgs),
    /// Replays the malicious-aggregator attack with known and secret noise.
    AttackDemo(AttackArgs),
    /// Accuracy of the encrypted argmax under the noisy backend.
    ArgmaxBench(ArgmaxBenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Gamma,
    Tau,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub param: SweepParam,
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    /// Space the grid geometrically instead of linearly.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DistCheckArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Gamma of the reference Laplace law. Defaults to the sampling gamma.
    #[arg(long, allow_hyphen_values = true)]
    pub reference_gamma: Option<f64>,
    #[arg(long, default_value_t = 0.02)]
    pub max_variance_error: f64,
    #[arg(long, default_value_t = 0.005)]
    pub max_ks: f64,
}

#[derive(Debug, Clone, Args)]
pub struct AttackArgs {
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// JSON or TOML file with `counts`, `k0` and `k1`.
    #[arg(long, value_name = "FILE")]
    pub scenario: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ArgmaxBenchArgs {
    /// Calibrate sigma_c by bisection to reach this accuracy first.
    #[arg(long)]
    pub target_accuracy: Option<f64>,
}

fn kebab<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}
