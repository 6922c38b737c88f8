use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use evograph_core::{Placement, UpdateRule};

#[derive(Debug, Parser)]
#[command(name = "evograph", version, about = "Fixation on superstars: closed forms, exact chains and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expected train length T, checked against the grid dynamic program
    Trainlen(TrainArgs),
    /// Finite and asymptotic superstar bounds with every error term
    Bounds(BoundsArgs),
    /// Exact fixation probabilities from the absorbing chain (N <= 16)
    Exact(ExactArgs),
    /// Monte Carlo fixation estimate
    Simulate(SimulateArgs),
    /// Probability that one reservoir mutant becomes two
    #[command(name = "one-to-two")]
    OneToTwo(OneToTwoArgs),
    /// Run a grid of jobs, one output row per job
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include wall-clock time (makes output non-reproducible)
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub r: f64,
    #[arg(long = "H")]
    pub h: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub r: f64,
    #[arg(long = "B")]
    pub b: usize,
    #[arg(long = "L")]
    pub l: usize,
    #[arg(long = "H")]
    pub h: usize,
    /// Defaults to floor(sqrt(B))
    #[arg(long)]
    pub delta: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Clone)]
pub struct GraphArgs {
    /// complete, cycle, star or superstar
    #[arg(long)]
    pub family: Option<String>,
    /// Node count for complete, cycle and star
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "B")]
    pub b: Option<usize>,
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long = "H")]
    pub h: Option<usize>,
    /// Graph document in JSON (see `GraphDocument`)
    #[arg(long, conflicts_with = "family")]
    pub graph: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value = "Bd", value_parser = parse_rule)]
    pub rule: UpdateRule,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Clone)]
pub struct RunArgs {
    #[arg(long, default_value = "Bd", value_parser = parse_rule)]
    pub rule: UpdateRule,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "max-steps")]
    pub max_steps: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value = "uniform", value_parser = parse_placement)]
    pub placement: Placement,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OneToTwoArgs {
    #[arg(long)]
    pub r: f64,
    #[arg(long = "B")]
    pub b: usize,
    #[arg(long = "L")]
    pub l: usize,
    #[arg(long = "H")]
    pub h: usize,
    #[arg(long, default_value = "reservoir", value_parser = parse_placement)]
    pub placement: Placement,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepTask {
    Trainlen,
    Bounds,
    Simulate,
    OneToTwo,
}

/// Grids are comma lists (`1.5,2,5`) or inclusive ranges (`start:stop:step`).
#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub task: SweepTask,
    #[arg(long)]
    pub r: String,
    #[arg(long = "B")]
    pub b: Option<String>,
    #[arg(long = "L")]
    pub l: Option<String>,
    #[arg(long = "H")]
    pub h: Option<String>,
    /// complete, cycle, star or superstar (simulate only)
    #[arg(long)]
    pub family: Option<String>,
    /// Node-count grid for complete, cycle and star
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub delta: Option<usize>,
    #[arg(long, default_value = "Bd")]
    pub rule: String,
    #[arg(long, default_value = "uniform")]
    pub placement: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "max-steps")]
    pub max_steps: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// Keep rows already in --out and run only the missing jobs
    #[arg(long, requires = "out")]
    pub resume: bool,
}

pub fn parse_rule(s: &str) -> Result<UpdateRule, String> {
    s.parse().map_err(|e: evograph_core::Error| e.to_string())
}

pub fn parse_placement(s: &str) -> Result<Placement, String> {
    s.parse().map_err(|e: evograph_core::Error| e.to_string())
}
