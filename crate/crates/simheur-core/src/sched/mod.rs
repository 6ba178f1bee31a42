//! Parallel-machine scheduling testbed: identical machines in parallel,
//! sequence-dependent setup times, stochastic (lognormal) processing
//! durations, and an objective that mixes total tardiness with makespan.
//!
//! Only processing durations are random; setup times and due dates are
//! deterministic data. The objective of a schedule under a realized duration
//! vector is
//!
//! ```text
//! w_tardiness · Σ_j max(0, C_j − due_j)  +  w_makespan · max_machine C_last
//! ```
//!
//! where completion times accrue along each machine as
//! `C = C_prev + setup[prev+1][job] + duration[job]`, with `C_prev = 0` and
//! the idle row `setup[0]` for a machine's first job.

mod enumerate;
mod format;
mod generate;

pub use enumerate::{enumeration_count, for_each_schedule, ENUMERATION_CAP};
pub use format::{parse_instance, write_instance, ParseError};
pub use generate::{generate_instance, GeneratorParams};

use crate::problem::{NeighborhoodProblem, ObjectiveSample, Problem};
use crate::rng::RngStream;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use std::fmt;
use thiserror::Error;

pub type JobId = usize;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchedError {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid durations: {0}")]
    InvalidDurations(String),
}

/// One job: its mean processing duration, the coefficient of variation of the
/// lognormal duration (0 = deterministic), and its due date.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub id: JobId,
    pub mean_duration: f64,
    pub cv: f64,
    pub due_date: f64,
}

/// A scheduling instance. `setup` has `num_jobs + 1` rows of `num_jobs`
/// columns: row 0 is the setup from an idle machine, row `i + 1` the setup
/// when the column job follows job `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    jobs: Vec<Job>,
    num_machines: usize,
    setup: Vec<Vec<f64>>,
    w_tardiness: f64,
    w_makespan: f64,
}

/// One realization of the random processing durations, indexed by job id.
#[derive(Debug, Clone, PartialEq)]
pub struct DurationVector(Vec<f64>);

impl DurationVector {
    pub fn new(durations: Vec<f64>) -> Result<Self, SchedError> {
        for (j, &d) in durations.iter().enumerate() {
            if !(d.is_finite() && d > 0.0) {
                return Err(SchedError::InvalidDurations(format!(
                    "duration of job {j} is {d}, must be positive and finite"
                )));
            }
        }
        Ok(Self(durations))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// An ordered assignment of every job to exactly one machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule {
    pub machine_sequences: Vec<Vec<JobId>>,
}

impl Schedule {
    pub fn new(machine_sequences: Vec<Vec<JobId>>) -> Self {
        Self { machine_sequences }
    }

    pub fn num_jobs(&self) -> usize {
        self.machine_sequences.iter().map(Vec::len).sum()
    }
}

impl fmt::Display for Schedule {
    /// Compact form `0,1|2` — machines separated by `|`, jobs by `,`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (m, seq) in self.machine_sequences.iter().enumerate() {
            if m > 0 {
                f.write_str("|")?;
            }
            for (k, job) in seq.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{job}")?;
            }
        }
        Ok(())
    }
}

impl Instance {
    pub fn new(
        jobs: Vec<Job>,
        num_machines: usize,
        setup: Vec<Vec<f64>>,
        w_tardiness: f64,
        w_makespan: f64,
    ) -> Result<Self, SchedError> {
        let n = jobs.len();
        if num_machines == 0 {
            return Err(SchedError::InvalidInstance(
                "num_machines must be positive".into(),
            ));
        }
        for (idx, job) in jobs.iter().enumerate() {
            if job.id != idx {
                return Err(SchedError::InvalidInstance(format!(
                    "job at position {idx} has id {}, ids must be 0..n in order",
                    job.id
                )));
            }
            if !(job.mean_duration.is_finite() && job.mean_duration > 0.0) {
                return Err(SchedError::InvalidInstance(format!(
                    "job {idx}: mean_duration {} must be positive",
                    job.mean_duration
                )));
            }
            if !(job.cv.is_finite() && job.cv >= 0.0) {
                return Err(SchedError::InvalidInstance(format!(
                    "job {idx}: cv {} must be nonnegative",
                    job.cv
                )));
            }
            if !(job.due_date.is_finite() && job.due_date >= 0.0) {
                return Err(SchedError::InvalidInstance(format!(
                    "job {idx}: due_date {} must be nonnegative",
                    job.due_date
                )));
            }
        }
        if setup.len() != n + 1 {
            return Err(SchedError::InvalidInstance(format!(
                "setup matrix has {} rows, expected {}",
                setup.len(),
                n + 1
            )));
        }
        for (r, row) in setup.iter().enumerate() {
            if row.len() != n {
                return Err(SchedError::InvalidInstance(format!(
                    "setup row {r} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(SchedError::InvalidInstance(format!(
                    "setup row {r} contains {bad}, entries must be nonnegative"
                )));
            }
        }
        if !(w_tardiness.is_finite() && w_tardiness >= 0.0)
            || !(w_makespan.is_finite() && w_makespan >= 0.0)
            || w_tardiness + w_makespan <= 0.0
        {
            return Err(SchedError::InvalidInstance(format!(
                "weights ({w_tardiness}, {w_makespan}) must be nonnegative with positive sum"
            )));
        }
        Ok(Self {
            jobs,
            num_machines,
            setup,
            w_tardiness,
            w_makespan,
        })
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn num_jobs(&self) -> usize {
        self.jobs.len()
    }

    pub fn num_machines(&self) -> usize {
        self.num_machines
    }

    pub fn setup(&self) -> &[Vec<f64>] {
        &self.setup
    }

    pub fn w_tardiness(&self) -> f64 {
        self.w_tardiness
    }

    pub fn w_makespan(&self) -> f64 {
        self.w_makespan
    }

    /// Checks the partition invariant: every job id appears in exactly one
    /// machine sequence, exactly once.
    pub fn validate_schedule(&self, schedule: &Schedule) -> Result<(), SchedError> {
        let n = self.num_jobs();
        if schedule.machine_sequences.len() != self.num_machines {
            return Err(SchedError::InvalidSchedule(format!(
                "{} machine sequences, instance has {} machines",
                schedule.machine_sequences.len(),
                self.num_machines
            )));
        }
        let mut seen = vec![false; n];
        let mut count = 0usize;
        for seq in &schedule.machine_sequences {
            for &job in seq {
                if job >= n {
                    return Err(SchedError::InvalidSchedule(format!(
                        "job id {job} out of range (instance has {n} jobs)"
                    )));
                }
                if seen[job] {
                    return Err(SchedError::InvalidSchedule(format!(
                        "job {job} appears more than once"
                    )));
                }
                seen[job] = true;
                count += 1;
            }
        }
        if count != n {
            return Err(SchedError::InvalidSchedule(format!(
                "{count} jobs scheduled, instance has {n}"
            )));
        }
        Ok(())
    }

    fn objective_with(
        &self,
        schedule: &Schedule,
        duration_of: impl Fn(JobId) -> f64,
    ) -> Result<f64, SchedError> {
        self.validate_schedule(schedule)?;
        let mut tardiness = 0.0f64;
        let mut makespan = 0.0f64;
        for seq in &schedule.machine_sequences {
            let mut completion = 0.0;
            let mut setup_row = 0usize; // idle
            for &job in seq {
                completion += self.setup[setup_row][job] + duration_of(job);
                tardiness += (completion - self.jobs[job].due_date).max(0.0);
                setup_row = job + 1;
            }
            makespan = makespan.max(completion);
        }
        Ok(self.w_tardiness * tardiness + self.w_makespan * makespan)
    }

    /// Objective of `schedule` under the realized `durations`.
    pub fn evaluate(
        &self,
        schedule: &Schedule,
        durations: &DurationVector,
    ) -> Result<f64, SchedError> {
        if durations.len() != self.num_jobs() {
            return Err(SchedError::InvalidDurations(format!(
                "{} durations for {} jobs",
                durations.len(),
                self.num_jobs()
            )));
        }
        self.objective_with(schedule, |j| durations.as_slice()[j])
    }

    /// Objective under mean durations: the deterministic counterpart
    /// `f(E[X], s)`.
    pub fn deterministic_objective(&self, schedule: &Schedule) -> Result<f64, SchedError> {
        self.objective_with(schedule, |j| self.jobs[j].mean_duration)
    }

    /// Per-job duration distributions, reusable across many replications.
    pub fn duration_sampler(&self) -> DurationSampler {
        DurationSampler::new(self)
    }

    /// One realization of the duration vector.
    pub fn sample_durations(&self, stream: RngStream) -> DurationVector {
        self.duration_sampler().sample(&mut stream.rng())
    }

    /// One Monte-Carlo replication of the objective.
    pub fn simulate_objective(
        &self,
        schedule: &Schedule,
        stream: RngStream,
    ) -> Result<f64, SchedError> {
        self.evaluate(schedule, &self.sample_durations(stream))
    }
}

/// Precomputed lognormal duration distributions for one instance. The
/// lognormal is parameterized to preserve the mean: `σ² = ln(1 + cv²)`,
/// `μ = ln(mean) − σ²/2`; a job with `cv = 0` keeps its mean exactly.
pub struct DurationSampler {
    dists: Vec<Option<LogNormal<f64>>>,
    means: Vec<f64>,
}

impl DurationSampler {
    fn new(instance: &Instance) -> Self {
        let dists = instance
            .jobs
            .iter()
            .map(|job| {
                if job.cv == 0.0 {
                    None
                } else {
                    let sigma2 = (1.0 + job.cv * job.cv).ln();
                    let mu = job.mean_duration.ln() - sigma2 / 2.0;
                    Some(LogNormal::new(mu, sigma2.sqrt()).expect("valid lognormal"))
                }
            })
            .collect();
        let means = instance.jobs.iter().map(|j| j.mean_duration).collect();
        Self { dists, means }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> DurationVector {
        let durations = self
            .dists
            .iter()
            .zip(&self.means)
            .map(|(dist, &mean)| match dist {
                Some(d) => d.sample(rng),
                None => mean,
            })
            .collect();
        DurationVector::new(durations).expect("lognormal draws are positive")
    }
}

impl Problem for Instance {
    type Solution = Schedule;

    fn deterministic_objective(&self, solution: &Schedule) -> f64 {
        Instance::deterministic_objective(self, solution).expect("engine schedules are valid")
    }

    fn simulate(&self, solution: &Schedule, stream: RngStream) -> ObjectiveSample {
        ObjectiveSample::new(
            self.simulate_objective(solution, stream)
                .expect("engine schedules are valid"),
        )
    }
}

impl NeighborhoodProblem for Instance {
    fn initial_solution(&self) -> Schedule {
        crate::search::initial_solution(self)
    }

    fn neighbor(&self, solution: &Schedule, rng: &mut ChaCha8Rng) -> Schedule {
        crate::search::neighbor(solution, rng)
    }
}
