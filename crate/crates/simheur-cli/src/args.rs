//! Command-line surface: `simheur generate | run | bench | oracle`.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "simheur",
    about = "Simheuristic optimization of stochastic scheduling problems",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate random scheduling instances as plain-text files.
    Generate(GenerateArgs),
    /// Run one strategy on one instance and write its trace CSV.
    Run(RunArgs),
    /// Run the full strategy x budget grid and write benchmark CSVs.
    Bench(BenchArgs),
    /// Enumerate a tiny instance and rank all schedules exactly.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of instance files to write.
    #[arg(long, default_value_t = 50)]
    pub num_instances: usize,
    #[arg(long, default_value_t = 50)]
    pub jobs: usize,
    #[arg(long, default_value_t = 4)]
    pub machines: usize,
    /// Coefficient of variation of every job's lognormal duration.
    #[arg(long, default_value_t = 0.5)]
    pub cv: f64,
    /// Tardiness factor of the due-date scheme.
    #[arg(long, default_value_t = 0.4)]
    pub tf: f64,
    /// Relative due-date range of the due-date scheme.
    #[arg(long, default_value_t = 0.6)]
    pub rdd: f64,
    /// Master seed; instance i uses a seed derived from (seed, i).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Instance file to solve.
    #[arg(long)]
    pub instance: PathBuf,
    /// TOML file mirroring the engine RunConfig; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Strategy override: dcop-only | fixed-interval | simulate-all-promising | ocba-guided.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Budget override, in simulation-replication units.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Worker threads for simulation replications (never changes results).
    #[arg(long)]
    pub sim_threads: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory of instance files (every .txt file is used, sorted by name).
    #[arg(long)]
    pub instances_dir: PathBuf,
    /// TOML file mirroring the engine RunConfig; grid values override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated budgets, strictly increasing.
    #[arg(long, default_value = "1000,10000,100000", value_delimiter = ',')]
    pub budgets: Vec<u64>,
    /// Comma-separated strategies; defaults to all four.
    #[arg(
        long,
        default_value = "dcop-only,fixed-interval,simulate-all-promising,ocba-guided",
        value_delimiter = ','
    )]
    pub strategies: Vec<String>,
    /// Independent runs per instance x strategy x budget cell.
    #[arg(long, default_value_t = 1)]
    pub reps_per_cell: u64,
    /// Replications for the out-of-budget oracle estimate of each returned
    /// solution (common random numbers per instance).
    #[arg(long, default_value_t = 10_000)]
    pub eval_reps: u64,
    #[arg(long)]
    pub sim_threads: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Instance file; must be small enough to enumerate (at most 8 jobs on
    /// at most 2 machines).
    #[arg(long)]
    pub instance: PathBuf,
    /// Replications per schedule for the expected-objective ranking.
    #[arg(long, default_value_t = 100_000)]
    pub eval_reps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}
