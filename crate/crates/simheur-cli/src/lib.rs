//! Library backing the `simheur` binary. Commands live here so integration
//! tests can call them in-process and inspect their structured output.

pub mod args;
pub mod commands;

pub use args::{BenchArgs, Cli, Command, GenerateArgs, OracleArgs, RunArgs};
pub use commands::{
    cmd_bench, cmd_generate, cmd_oracle, cmd_run, AggregateRow, BenchOutput, BenchmarkRow,
    OracleOutput, RunOutput,
};

/// Errors are split by whose fault they are: `Usage` is a bad invocation
/// (exit code 2), `Runtime` is an environment failure (exit code 1).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Runs one parsed command and prints its summary to stdout.
pub fn execute(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Generate(args) => {
            let written = cmd_generate(args)?;
            println!(
                "wrote {} instances to {}",
                written.len(),
                args.out_dir.display()
            );
        }
        Command::Run(args) => {
            let output = cmd_run(args)?;
            println!("{}", output.summary());
            println!("trace written to {}", output.trace_path.display());
        }
        Command::Bench(args) => {
            let output = cmd_bench(args)?;
            println!("strategy,budget,mean_oracle_objective,runs");
            for row in &output.aggregate {
                println!(
                    "{},{},{},{}",
                    row.strategy, row.budget, row.mean_oracle_objective, row.runs
                );
            }
            println!("rows written to {}", output.rows_path.display());
            println!("aggregate written to {}", output.aggregate_path.display());
        }
        Command::Oracle(args) => {
            let output = cmd_oracle(args)?;
            println!("{}", output.summary());
            println!("det ranking written to {}", output.det_path.display());
            println!(
                "expected ranking written to {}",
                output.expected_path.display()
            );
        }
    }
    Ok(())
}
