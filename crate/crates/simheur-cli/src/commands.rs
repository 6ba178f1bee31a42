//! Implementations of the four subcommands. Each returns structured output
//! so tests can drive commands in-process; `main` only maps errors to exit
//! codes and prints summaries.

use crate::args::{BenchArgs, GenerateArgs, OracleArgs, RunArgs};
use crate::{CliError, CliResult};
use serde::Serialize;
use simheur_core::engine::{self, RunConfig, Strategy, ALL_STRATEGIES};
use simheur_core::mc::{crn_rank, crn_stats};
use simheur_core::rng::derive_seed;
use simheur_core::sched::{
    enumeration_count, for_each_schedule, generate_instance, parse_instance, write_instance,
    GeneratorParams, Instance, Schedule, ENUMERATION_CAP,
};
use simheur_core::stats::SampleStats;
use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

/// Seed-derivation domains under the user's master seed.
const DOMAIN_GENERATE: u64 = 10;
const DOMAIN_BENCH_RUN: u64 = 11;
const DOMAIN_BENCH_EVAL: u64 = 12;
const DOMAIN_ORACLE_EVAL: u64 = 13;

fn read_to_string(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn ensure_out_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))
}

fn load_instance(path: &Path) -> CliResult<Instance> {
    let text = read_to_string(path)?;
    parse_instance(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_config(path: Option<&PathBuf>) -> CliResult<RunConfig> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = read_to_string(path)?;
    toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn parse_strategy(name: &str) -> CliResult<Strategy> {
    name.parse()
        .map_err(|e: engine::UnknownStrategy| CliError::Usage(e.to_string()))
}

fn validated(config: RunConfig) -> CliResult<RunConfig> {
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

pub fn cmd_generate(args: &GenerateArgs) -> CliResult<Vec<PathBuf>> {
    if args.num_instances == 0 {
        return Err(CliError::Usage("--num-instances must be positive".into()));
    }
    if args.jobs == 0 || args.machines == 0 {
        return Err(CliError::Usage("--jobs and --machines must be positive".into()));
    }
    let params = GeneratorParams {
        cv: args.cv,
        tardiness_factor: args.tf,
        due_date_range: args.rdd,
        ..GeneratorParams::default()
    };
    ensure_out_dir(&args.out_dir)?;
    let mut written = Vec::with_capacity(args.num_instances);
    for i in 0..args.num_instances {
        let instance_seed = derive_seed(args.seed, &[DOMAIN_GENERATE, i as u64]);
        let instance = generate_instance(args.jobs, args.machines, instance_seed, &params);
        let path = args.out_dir.join(format!("instance_{i:03}.txt"));
        write_file(&path, &write_instance(&instance))?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug)]
pub struct RunOutput {
    pub strategy: Strategy,
    pub budget: u64,
    pub returned_estimate: f64,
    pub replications_on_best: u64,
    pub best_schedule: Schedule,
    pub trace_path: PathBuf,
}

impl RunOutput {
    /// The one-line summary printed on success.
    pub fn summary(&self) -> String {
        format!(
            "strategy={} budget={} returned_estimate={}",
            self.strategy, self.budget, self.returned_estimate
        )
    }
}

pub fn cmd_run(args: &RunArgs) -> CliResult<RunOutput> {
    let instance = load_instance(&args.instance)?;
    let mut config = load_config(args.config.as_ref())?;
    if let Some(name) = &args.strategy {
        config.strategy = parse_strategy(name)?;
    }
    if let Some(budget) = args.budget {
        config.total_budget = budget;
    }
    if let Some(threads) = args.sim_threads {
        config.sim_threads = threads;
    }
    let config = validated(config)?;

    let result = engine::run(&instance, &config, args.seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    ensure_out_dir(&args.out_dir)?;
    let trace_path = args
        .out_dir
        .join(format!("trace_{}_seed{}.csv", config.strategy, args.seed));
    write_file(&trace_path, &result.trace.to_csv())?;

    Ok(RunOutput {
        strategy: config.strategy,
        budget: config.total_budget,
        returned_estimate: result.estimated_expected_objective,
        replications_on_best: result.replications_on_best,
        best_schedule: result.best_solution,
        trace_path,
    })
}

/// One benchmark run; columns are stable and documented in the README.
#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkRow {
    pub instance_id: String,
    pub strategy: String,
    pub budget: u64,
    pub run_seed: u64,
    pub returned_objective_estimate: f64,
    pub oracle_objective_estimate: f64,
    pub oracle_se: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateRow {
    pub strategy: String,
    pub budget: u64,
    pub mean_oracle_objective: f64,
    pub runs: u64,
}

#[derive(Debug)]
pub struct BenchOutput {
    pub rows: Vec<BenchmarkRow>,
    pub aggregate: Vec<AggregateRow>,
    pub rows_path: PathBuf,
    pub aggregate_path: PathBuf,
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> CliResult<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes).expect("CSV output is UTF-8");
    write_file(path, &text)
}

/// Instance files of a directory, sorted by file name so every platform
/// enumerates them in the same order.
fn instance_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = fs::read_dir(dir)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "txt"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Usage(format!(
            "{}: no .txt instance files found",
            dir.display()
        )));
    }
    Ok(files)
}

/// Canonical index of a strategy, independent of the order the user listed
/// them in, so a cell's seed depends only on (master, instance, strategy,
/// budget, rep).
fn strategy_ordinal(strategy: Strategy) -> u64 {
    ALL_STRATEGIES
        .iter()
        .position(|&s| s == strategy)
        .expect("strategy is one of the four") as u64
}

pub fn cmd_bench(args: &BenchArgs) -> CliResult<BenchOutput> {
    if args.budgets.is_empty() {
        return Err(CliError::Usage("--budgets must not be empty".into()));
    }
    if !args.budgets.windows(2).all(|w| w[0] < w[1]) {
        return Err(CliError::Usage(format!(
            "budget grid {:?} must be strictly increasing",
            args.budgets
        )));
    }
    if args.reps_per_cell == 0 || args.eval_reps == 0 {
        return Err(CliError::Usage(
            "--reps-per-cell and --eval-reps must be positive".into(),
        ));
    }
    let strategies: Vec<Strategy> = args
        .strategies
        .iter()
        .map(|s| parse_strategy(s))
        .collect::<CliResult<_>>()?;
    let base_config = {
        let mut config = load_config(args.config.as_ref())?;
        if let Some(threads) = args.sim_threads {
            config.sim_threads = threads;
        }
        validated(config)?
    };

    let files = instance_files(&args.instances_dir)?;
    let mut rows: Vec<BenchmarkRow> = Vec::new();
    for (inst_idx, path) in files.iter().enumerate() {
        let instance = load_instance(path)?;
        let instance_id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("instance_{inst_idx}"));
        // Oracle evaluation uses common random numbers: one stream family
        // per instance, shared by every strategy, budget, and rep.
        let eval_seed = derive_seed(args.seed, &[DOMAIN_BENCH_EVAL, inst_idx as u64]);
        let mut oracle_cache: HashMap<Schedule, (f64, f64)> = HashMap::new();
        for &strategy in &strategies {
            for &budget in &args.budgets {
                for rep in 0..args.reps_per_cell {
                    let run_seed = derive_seed(
                        args.seed,
                        &[
                            DOMAIN_BENCH_RUN,
                            inst_idx as u64,
                            strategy_ordinal(strategy),
                            budget,
                            rep,
                        ],
                    );
                    let config = RunConfig {
                        strategy,
                        total_budget: budget,
                        ..base_config.clone()
                    };
                    let result = engine::run(&instance, &config, run_seed)
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                    let (oracle_mean, oracle_se) = *oracle_cache
                        .entry(result.best_solution.clone())
                        .or_insert_with(|| {
                            let stats =
                                crn_stats(&instance, &result.best_solution, eval_seed, args.eval_reps);
                            (stats.mean(), stats.std_error())
                        });
                    rows.push(BenchmarkRow {
                        instance_id: instance_id.clone(),
                        strategy: strategy.to_string(),
                        budget,
                        run_seed,
                        returned_objective_estimate: result.estimated_expected_objective,
                        oracle_objective_estimate: oracle_mean,
                        oracle_se,
                    });
                }
            }
        }
    }

    // Aggregate in grid order: strategies as listed, budgets ascending.
    let mut aggregate = Vec::new();
    for &strategy in &strategies {
        for &budget in &args.budgets {
            let name = strategy.to_string();
            let mut stats = SampleStats::new();
            for row in rows.iter().filter(|r| r.strategy == name && r.budget == budget) {
                stats
                    .update(row.oracle_objective_estimate)
                    .expect("oracle estimates are finite");
            }
            aggregate.push(AggregateRow {
                strategy: name,
                budget,
                mean_oracle_objective: stats.mean(),
                runs: stats.n(),
            });
        }
    }

    ensure_out_dir(&args.out_dir)?;
    let rows_path = args.out_dir.join("benchmark.csv");
    let aggregate_path = args.out_dir.join("aggregate.csv");
    write_csv(&rows_path, &rows)?;
    write_csv(&aggregate_path, &aggregate)?;
    Ok(BenchOutput { rows, aggregate, rows_path, aggregate_path })
}

#[derive(Debug, Clone, Serialize)]
struct DetRankRow {
    rank: usize,
    schedule: String,
    det_objective: f64,
}

#[derive(Debug, Clone, Serialize)]
struct ExpectedRankRow {
    rank: usize,
    schedule: String,
    expected_objective: f64,
    se: f64,
}

#[derive(Debug)]
pub struct OracleOutput {
    pub schedule_count: u128,
    pub det_best: (Schedule, f64),
    pub expected_best: (Schedule, f64, f64),
    /// The deterministic and stochastic rankings disagree on the top
    /// schedule: the flaw of averages, made visible.
    pub rankings_differ: bool,
    pub det_path: PathBuf,
    pub expected_path: PathBuf,
}

impl OracleOutput {
    pub fn summary(&self) -> String {
        let (det_schedule, det_value) = &self.det_best;
        let (exp_schedule, exp_value, exp_se) = &self.expected_best;
        format!(
            "schedules={} det_best={det_value} det_best_schedule={det_schedule} \
             expected_best={exp_value} expected_se={exp_se} expected_best_schedule={exp_schedule} \
             rankings_differ={}",
            self.schedule_count, self.rankings_differ
        )
    }
}

pub fn cmd_oracle(args: &OracleArgs) -> CliResult<OracleOutput> {
    if args.eval_reps == 0 {
        return Err(CliError::Usage("--eval-reps must be positive".into()));
    }
    let instance = load_instance(&args.instance)?;
    let (n, m) = (instance.num_jobs(), instance.num_machines());
    let count = enumeration_count(n, m);
    let too_large = n > 8
        || m > 2
        || match count {
            Some(c) => c > ENUMERATION_CAP,
            None => true,
        };
    if too_large {
        let shown = count
            .map(|c| c.to_string())
            .unwrap_or_else(|| "more than u128 can hold".into());
        return Err(CliError::Usage(format!(
            "too large to enumerate: {n} jobs on {m} machines gives {shown} schedules \
             (limit: 8 jobs, 2 machines, {ENUMERATION_CAP} schedules)"
        )));
    }
    let count = count.expect("checked above");

    let mut schedules = Vec::with_capacity(count as usize);
    for_each_schedule(n, m, |s| schedules.push(s.clone()));
    assert_eq!(schedules.len() as u128, count, "enumeration count mismatch");

    let det_values: Vec<f64> = schedules
        .iter()
        .map(|s| {
            instance
                .deterministic_objective(s)
                .expect("enumerated schedules are valid")
        })
        .collect();
    let eval_seed = derive_seed(args.seed, &[DOMAIN_ORACLE_EVAL]);
    let expected = crn_rank(&instance, &schedules, eval_seed, args.eval_reps);

    let mut det_order: Vec<usize> = (0..schedules.len()).collect();
    det_order.sort_by(|&a, &b| det_values[a].total_cmp(&det_values[b]).then(a.cmp(&b)));
    let mut exp_order: Vec<usize> = (0..schedules.len()).collect();
    exp_order.sort_by(|&a, &b| {
        expected[a]
            .mean()
            .total_cmp(&expected[b].mean())
            .then(a.cmp(&b))
    });

    let det_rows: Vec<DetRankRow> = det_order
        .iter()
        .enumerate()
        .map(|(rank, &i)| DetRankRow {
            rank: rank + 1,
            schedule: schedules[i].to_string(),
            det_objective: det_values[i],
        })
        .collect();
    let exp_rows: Vec<ExpectedRankRow> = exp_order
        .iter()
        .enumerate()
        .map(|(rank, &i)| ExpectedRankRow {
            rank: rank + 1,
            schedule: schedules[i].to_string(),
            expected_objective: expected[i].mean(),
            se: expected[i].std_error(),
        })
        .collect();

    ensure_out_dir(&args.out_dir)?;
    let det_path = args.out_dir.join("oracle_det.csv");
    let expected_path = args.out_dir.join("oracle_expected.csv");
    write_csv(&det_path, &det_rows)?;
    write_csv(&expected_path, &exp_rows)?;

    let det_best_idx = det_order[0];
    let exp_best_idx = exp_order[0];
    Ok(OracleOutput {
        schedule_count: count,
        det_best: (schedules[det_best_idx].clone(), det_values[det_best_idx]),
        expected_best: (
            schedules[exp_best_idx].clone(),
            expected[exp_best_idx].mean(),
            expected[exp_best_idx].std_error(),
        ),
        rankings_differ: det_best_idx != exp_best_idx,
        det_path,
        expected_path,
    })
}
