use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hed_core::DecayParams;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "hed",
    version,
    about = "Early-detection scoring of detector posterior streams"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score one stream: HED, exact integral, half-life, bounds, optional phases and smooth surrogate.
    Score(ScoreArgs),
    /// Paired block-bootstrap comparison of two streams on the same window.
    Compare(CompareArgs),
    /// FAR-HED curve of one stream, or two streams with area between curves and dominance.
    Frontier(FrontierArgs),
    /// Generate a seeded synthetic scenario from a flat JSON config.
    Simulate(SimulateArgs),
    /// Print the domain calibration table with half-lives computed from the decay constants.
    Table,
}

/// Exactly one of `--lambda` and `--budget`.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct DecayArgs {
    /// Decay constant per step.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Response budget in steps; the decay constant becomes ln 2 / budget.
    #[arg(long)]
    pub budget: Option<f64>,
}

impl DecayArgs {
    pub fn resolve(&self) -> Result<DecayParams, CliError> {
        Ok(match (self.lambda, self.budget) {
            (Some(l), None) => DecayParams::new(l)?,
            (None, Some(b)) => DecayParams::from_budget(b)?,
            _ => return Err(CliError::Usage("give exactly one of --lambda and --budget".into())),
        })
    }
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    pub stream: PathBuf,
    #[command(flatten)]
    pub decay: DecayArgs,
    /// Split the post-onset window into this many near-equal phases.
    #[arg(long)]
    pub phases: Option<usize>,
    /// Also report the softplus surrogate with this sharpness.
    #[arg(long, value_name = "BETA")]
    pub smooth: Option<f64>,
    /// Write per-step lifts and discounts here.
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub stream_a: PathBuf,
    pub stream_b: PathBuf,
    #[command(flatten)]
    pub decay: DecayArgs,
    /// Number of bootstrap resamples.
    #[arg(long = "resamples", visible_alias = "B", default_value_t = 2000)]
    pub resamples: usize,
    /// Block length; defaults to floor(T^(1/3)).
    #[arg(long)]
    pub block: Option<usize>,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    /// Required: there is no entropy fallback.
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FrontierArgs {
    pub stream_a: PathBuf,
    pub stream_b: Option<PathBuf>,
    #[command(flatten)]
    pub decay: DecayArgs,
    /// Comma-separated thresholds; defaults to every stream value plus 0 and 1.
    #[arg(long)]
    pub thresholds: Option<String>,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    #[arg(long)]
    pub out_svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub config: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}
