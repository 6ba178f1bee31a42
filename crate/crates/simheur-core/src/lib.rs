//! Simheuristic engine for stochastic combinatorial optimization.
//!
//! A simheuristic couples a fast deterministic metaheuristic with Monte-Carlo
//! simulation: the metaheuristic proposes solutions quickly by optimizing the
//! deterministic counterpart of the problem (random parameters replaced by
//! their means), while simulation estimates the true expected objective of the
//! most promising candidates. The engine in this crate decides *when* to
//! switch between the two activities with a Bayesian expected-opportunity-cost
//! criterion over a fixed-size elite set, and allocates simulation
//! replications with the OCBA rule (optimal computing budget allocation).
//!
//! Module map:
//!
//! - [`budget`] — replication-denominated budget accounting
//! - [`rng`] — seedable, splittable random-number streams
//! - [`problem`] — the problem abstraction (deterministic objective + simulator)
//! - [`stats`] — single-pass sample statistics
//! - [`ranking`] — posteriors, expected opportunity cost, OCBA allocation
//! - [`sched`] — parallel-machine scheduling testbed with sequence-dependent
//!   setups and lognormal processing durations
//! - [`search`] — simulated-annealing search over schedules
//! - [`engine`] — the orchestration loop and the baseline strategies
//! - [`mc`] — common-random-number estimation helpers

pub mod budget;
pub mod engine;
pub mod mc;
pub mod problem;
pub mod ranking;
pub mod rng;
pub mod sched;
pub mod search;
pub mod stats;

pub use budget::{BudgetClock, BudgetExhausted};
pub use engine::{
    run, EliteSet, RunConfig, RunResult, RunTrace, Strategy, ThresholdMode, TraceEvent,
};
pub use problem::{NeighborhoodProblem, ObjectiveSample, Problem};
pub use ranking::{eoc_bonferroni, ocba_allocate, select_best, Allocation, Belief};
pub use rng::{substream, RngStream};
pub use sched::{DurationVector, Instance, Job, Schedule};
pub use search::{Annealer, PromisingFilter, SaParams, SearchState};
pub use stats::SampleStats;
