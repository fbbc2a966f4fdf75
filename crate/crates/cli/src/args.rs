use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grn_core::ModelKind;

#[derive(Debug, Parser)]
#[command(
    name = "grn",
    version,
    about = "Synchrony partitions, quotients, lifts and dynamics of gene regulatory networks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Dynamical model: sum, mult or prod.
    #[arg(long, global = true, default_value = "sum", value_parser = parse_model)]
    pub model: ModelKind,
    /// hill:n=2,beta=1 | circadian:a=2,b=1 | custom:<file.json>
    #[arg(long, global = true, default_value = "hill:n=2,beta=1")]
    pub regfamily: String,
    /// Tolerance for weight sums (absolute) and row products (relative).
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (a directory for `lifts`); stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// json everywhere, csv for trajectories only, text for a terse summary.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FillKind {
    Uniform,
    Random,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a network document against the model invariants.
    Validate {
        /// Network file or bundled example name.
        network: String,
    },
    /// Test a partition, or enumerate all synchrony partitions.
    Synchrony {
        network: String,
        #[arg(long, conflicts_with = "partition")]
        enumerate: bool,
        /// Classes of 1-based genes, e.g. "1,2,3|4,5".
        #[arg(long)]
        partition: Option<String>,
    },
    /// Quotient network of a synchrony partition.
    Quotient {
        network: String,
        #[arg(long)]
        partition: String,
    },
    /// Lifts of a quotient network for given class sizes.
    Lifts {
        quotient: String,
        /// Lift class sizes, one per quotient gene.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Write every lift (multiplicity pairs under mult, supports under sum).
        #[arg(long, alias = "enumerate")]
        enumerate_mults: bool,
        #[arg(long, value_enum, default_value = "uniform")]
        fill: FillKind,
        #[arg(long, default_value_t = 1000)]
        max_count: u128,
    },
    /// Integrate the model equations.
    Simulate {
        network: String,
        /// Horizon.
        #[arg(long = "t", default_value_t = 100.0)]
        horizon: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        /// state.json (array of coordinates) or random:<seed>; random:<--seed> by default.
        #[arg(long)]
        init: Option<String>,
        #[arg(long, default_value = "rk4")]
        integrator: String,
        /// Record every k-th step.
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Integrate synchronized starts and measure drift off the synchrony space.
    Verify {
        network: String,
        #[arg(long)]
        partition: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long = "t", default_value_t = 50.0)]
        horizon: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
    },
    /// Bundled example networks.
    Examples {
        #[arg(long)]
        list: bool,
        /// Print one example's network document.
        #[arg(long, conflicts_with = "list")]
        show: Option<String>,
    },
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse::<ModelKind>().map_err(|e| e.to_string())
}
