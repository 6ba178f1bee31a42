//! The orchestration loop: maintain the elite set, alternate between
//! deterministic search and Monte-Carlo simulation, finalize with the
//! remaining budget, and return the best solution found.
//!
//! Four strategies share the scaffolding. The search phase may spend up to
//! `(1 - finalize_fraction) * total_budget`; the reserve is spent on
//! simulation during finalization. Every replication's RNG stream is derived
//! from `(run seed, admission id, replication index)`, so results do not
//! depend on how many worker threads execute them.

mod config;
mod elite;
mod trace;

pub use config::{
    InvalidConfig, RunConfig, Strategy, ThresholdMode, UnknownStrategy, ALL_STRATEGIES,
};
pub use elite::{AdmitOutcome, EliteEntry, EliteSet};
pub use trace::{Phase, RunTrace, TraceEvent};

use crate::budget::{BudgetClock, BUDGET_EPS};
use crate::problem::{NeighborhoodProblem, Problem};
use crate::ranking::{eoc_bonferroni, ocba_allocate, select_best, Belief};
use crate::rng::{derive_seed, substream, RngStream};
use crate::search::{Annealer, PromisingFilter};

/// Stream-derivation domains under the run seed.
const DOMAIN_SEARCH: u64 = 1;
const DOMAIN_SIM: u64 = 2;

#[derive(Debug, Clone)]
pub struct RunResult<S> {
    pub best_solution: S,
    pub estimated_expected_objective: f64,
    pub replications_on_best: u64,
    pub trace: RunTrace,
}

/// How a confidence phase ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Confidence {
    /// EOC dropped to the threshold; search may resume.
    Confident,
    /// The budget cap cut the phase short.
    Exhausted,
}

struct Engine<'a, P: Problem> {
    problem: &'a P,
    config: &'a RunConfig,
    seed: u64,
    clock: BudgetClock,
    elite: EliteSet<P::Solution>,
    trace: RunTrace,
    pool: Option<rayon::ThreadPool>,
}

impl<'a, P: Problem> Engine<'a, P> {
    fn new(problem: &'a P, config: &'a RunConfig, seed: u64) -> Self {
        let pool = (config.sim_threads > 1).then(|| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.sim_threads)
                .build()
                .expect("simulation thread pool")
        });
        Self {
            problem,
            config,
            seed,
            clock: BudgetClock::new(config.total_budget, config.det_eval_cost),
            elite: EliteSet::new(config.elite_capacity),
            trace: RunTrace::new(),
            pool,
        }
    }

    /// Budget available for the search phase, in units.
    fn search_cap(&self) -> f64 {
        (1.0 - self.config.finalize_fraction) * self.config.total_budget as f64
    }

    fn total_cap(&self) -> f64 {
        self.config.total_budget as f64
    }

    /// Whether one more deterministic evaluation fits under `cap`.
    fn can_eval(&self, cap: f64) -> bool {
        self.clock.spent() + self.config.det_eval_cost <= cap + BUDGET_EPS
    }

    fn admit(&mut self, candidate: P::Solution, det_value: f64) -> AdmitOutcome {
        let outcome = self.elite.admit(candidate, det_value, self.config.n0);
        if let AdmitOutcome::Admitted { evicted } = outcome {
            self.trace.push(
                self.clock.spent(),
                TraceEvent::CandidateAdmitted {
                    det_value,
                    elite_size: self.elite.len(),
                    evicted,
                },
            );
        }
        outcome
    }

    /// Runs the requested replications, trimmed to what fits under `cap`
    /// (and under the total budget). Requests are `(entry index, count)`;
    /// trimming cuts from the back of the list. Returns how many ran.
    fn grant_reps(&mut self, requests: &[(usize, u64)], cap: f64) -> u64 {
        let headroom = (cap.min(self.total_cap()) - self.clock.spent()).max(0.0);
        let affordable = ((headroom + BUDGET_EPS).floor() as u64).min(self.clock.remaining_replications());
        let wanted: u64 = requests.iter().map(|&(_, w)| w).sum();
        let granted = wanted.min(affordable);
        if granted == 0 {
            return 0;
        }

        let mut plan: Vec<(usize, RngStream)> = Vec::with_capacity(granted as usize);
        let mut left = granted;
        for &(idx, want) in requests {
            let take = want.min(left);
            let entry = &self.elite.entries()[idx];
            let sim_seed = derive_seed(self.seed, &[DOMAIN_SIM, entry.admission_id]);
            let base = entry.stats.n();
            for k in 0..take {
                plan.push((idx, substream(sim_seed, base + k)));
            }
            left -= take;
            if left == 0 {
                break;
            }
        }
        self.clock
            .charge_sim(granted)
            .expect("grant was sized to the remaining budget");

        let problem = self.problem;
        let entries = self.elite.entries();
        let simulate = |&(idx, stream): &(usize, RngStream)| {
            problem.simulate(&entries[idx].solution, stream).value
        };
        let values: Vec<f64> = match &self.pool {
            Some(pool) => {
                use rayon::prelude::*;
                pool.install(|| plan.par_iter().map(simulate).collect())
            }
            None => plan.iter().map(simulate).collect(),
        };
        // Merging in plan order keeps the statistics independent of worker
        // scheduling: values were collected in plan order either way.
        for (&(idx, _), value) in plan.iter().zip(values) {
            self.elite
                .entry_mut(idx)
                .stats
                .update(value)
                .expect("objective samples are finite");
        }
        granted
    }

    /// Replications needed to lift every entry to `n0`.
    fn topup_requests(&self) -> Vec<(usize, u64)> {
        self.elite
            .entries()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.stats.n() < self.config.n0)
            .map(|(i, e)| (i, self.config.n0 - e.stats.n()))
            .collect()
    }

    /// Posterior beliefs for all entries; `None` if any entry is below `n0`.
    fn beliefs(&self) -> Option<Vec<Belief>> {
        self.elite
            .entries()
            .iter()
            .map(|e| Belief::from_stats(&e.stats, self.config.n0))
            .collect()
    }

    fn effective_threshold(&self, beliefs: &[Belief]) -> f64 {
        match self.config.threshold_mode {
            ThresholdMode::Absolute => self.config.eoc_threshold,
            ThresholdMode::RelativeToBestMean => {
                let best = select_best(beliefs);
                self.config.eoc_threshold * beliefs[best].posterior_mean().abs()
            }
        }
    }

    /// Simulates until the expected opportunity cost of the elite set drops
    /// to the effective threshold or the budget cap is hit. Emits the
    /// simulate/search phase switches and one `eoc_checked` event per loop;
    /// the switch back to search certifies the final check passed.
    fn ensure_confident(&mut self, cap: f64) -> Confidence {
        assert!(!self.elite.is_empty(), "confidence needs a nonempty elite set");
        let mut in_simulate_phase = false;
        loop {
            let topups = self.topup_requests();
            let wanted: u64 = topups.iter().map(|&(_, w)| w).sum();
            if wanted > 0 {
                if !in_simulate_phase {
                    self.trace
                        .push(self.clock.spent(), TraceEvent::PhaseSwitch { to: Phase::Simulate });
                    in_simulate_phase = true;
                }
                if self.grant_reps(&topups, cap) < wanted {
                    return Confidence::Exhausted;
                }
            }

            let beliefs = self.beliefs().expect("all entries were just topped up");
            let eoc = eoc_bonferroni(&beliefs);
            let threshold = self.effective_threshold(&beliefs);
            let confident = eoc <= threshold;
            self.trace.push(
                self.clock.spent(),
                TraceEvent::EocChecked { eoc, threshold, confident },
            );
            if confident {
                if in_simulate_phase {
                    self.trace
                        .push(self.clock.spent(), TraceEvent::PhaseSwitch { to: Phase::Search });
                }
                return Confidence::Confident;
            }

            let headroom = (cap.min(self.total_cap()) - self.clock.spent()).max(0.0);
            let affordable = ((headroom + BUDGET_EPS).floor() as u64)
                .min(self.clock.remaining_replications());
            if affordable == 0 {
                return Confidence::Exhausted;
            }
            if !in_simulate_phase {
                self.trace
                    .push(self.clock.spent(), TraceEvent::PhaseSwitch { to: Phase::Simulate });
                in_simulate_phase = true;
            }
            let delta = self.config.ocba_delta.min(affordable);
            let requests: Vec<(usize, u64)> = ocba_allocate(&beliefs, delta)
                .additional_reps
                .iter()
                .enumerate()
                .filter(|&(_, &r)| r > 0)
                .map(|(i, &r)| (i, r))
                .collect();
            let granted = self.grant_reps(&requests, cap);
            self.trace
                .push(self.clock.spent(), TraceEvent::OcbaRound { requested: delta, granted });
            if granted < delta {
                return Confidence::Exhausted;
            }
        }
    }

    /// Equal spread of `reps` over the elite set, first entries taking the
    /// remainder.
    fn equal_spread(&self, reps: u64) -> Vec<(usize, u64)> {
        let len = self.elite.len() as u64;
        let base = reps / len;
        let extra = reps % len;
        (0..self.elite.len())
            .map(|i| (i, base + u64::from((i as u64) < extra)))
            .filter(|&(_, r)| r > 0)
            .collect()
    }

    /// Index of the entry to return: posterior-based when every entry has a
    /// belief, otherwise by the admission key (mean if mature, else det).
    fn final_choice(&self) -> usize {
        if let Some(beliefs) = self.beliefs() {
            return select_best(&beliefs);
        }
        let mut best = 0;
        let mut best_key = f64::INFINITY;
        for (i, entry) in self.elite.entries().iter().enumerate() {
            let key = EliteSet::<P::Solution>::entry_key(entry, self.config.n0);
            if key < best_key {
                best_key = key;
                best = i;
            }
        }
        best
    }

    fn result_for(&mut self, index: usize) -> RunResult<P::Solution> {
        let entry = &self.elite.entries()[index];
        let estimated = if entry.stats.n() > 0 {
            entry.stats.mean()
        } else {
            entry.det_value
        };
        let replications = entry.stats.n();
        let solution = entry.solution.clone();
        self.trace.push(
            self.clock.spent(),
            TraceEvent::Returned {
                best_mean: estimated,
                replications_on_best: replications,
            },
        );
        debug_assert!(self.clock.spent() <= self.total_cap() + BUDGET_EPS);
        debug_assert!(self.elite.contains(&solution));
        RunResult {
            best_solution: solution,
            estimated_expected_objective: estimated,
            replications_on_best: replications,
            trace: std::mem::take(&mut self.trace),
        }
    }
}

/// Executes one full run of the configured strategy. The result is a pure
/// function of `(problem, config, seed)`; `config.sim_threads` changes only
/// wall-clock time, never the outcome.
pub fn run<P: NeighborhoodProblem>(
    problem: &P,
    config: &RunConfig,
    seed: u64,
) -> Result<RunResult<P::Solution>, InvalidConfig> {
    config.validate()?;
    let mut engine = Engine::new(problem, config, seed);
    let mut annealer = Annealer::new(
        problem,
        config.sa.clone(),
        substream(derive_seed(seed, &[DOMAIN_SEARCH]), 0),
    );
    let filter = PromisingFilter::new(config.promising_gap);

    // The construction heuristic costs one deterministic evaluation. On a
    // budget too small even for that, skip straight to finalization.
    let _ = engine.clock.charge_det(1);
    let initial = annealer.state().best.clone();
    let initial_value = annealer.state().best_value;
    engine.admit(initial, initial_value);

    let search_cap = engine.search_cap();
    match config.strategy {
        Strategy::DcopOnly => {
            while engine.can_eval(search_cap) {
                annealer.step();
                engine.clock.charge_det(1).expect("can_eval checked the cost");
            }
        }
        Strategy::FixedInterval => {
            'outer: while engine.can_eval(search_cap) {
                let mut steps = 0;
                while steps < config.interval_det_evals {
                    if !engine.can_eval(search_cap) {
                        break 'outer;
                    }
                    let outcome = annealer.step();
                    engine.clock.charge_det(1).expect("can_eval checked the cost");
                    steps += 1;
                    if outcome.accepted
                        && filter.is_promising(outcome.proposed_value, annealer.state().best_value)
                    {
                        engine.admit(annealer.state().current.clone(), outcome.proposed_value);
                    }
                }
                let requests = engine.equal_spread(config.interval_reps);
                let wanted: u64 = requests.iter().map(|&(_, w)| w).sum();
                if engine.grant_reps(&requests, search_cap) < wanted {
                    break;
                }
            }
        }
        Strategy::SimulateAllPromising => {
            // The initial admission gets its replications like any other.
            let idx = engine.elite.len() - 1;
            engine.grant_reps(&[(idx, config.per_candidate_reps)], search_cap);
            while engine.can_eval(search_cap) {
                let outcome = annealer.step();
                engine.clock.charge_det(1).expect("can_eval checked the cost");
                if outcome.accepted
                    && filter.is_promising(outcome.proposed_value, annealer.state().best_value)
                {
                    let candidate = annealer.state().current.clone();
                    if let AdmitOutcome::Admitted { .. } =
                        engine.admit(candidate.clone(), outcome.proposed_value)
                    {
                        let idx = engine.elite.position(&candidate).expect("just admitted");
                        engine.grant_reps(&[(idx, config.per_candidate_reps)], search_cap);
                    }
                }
            }
        }
        Strategy::OcbaGuided => {
            let mut confidence = engine.ensure_confident(search_cap);
            let mut since_check = 0u64;
            while confidence != Confidence::Exhausted && engine.can_eval(search_cap) {
                let outcome = annealer.step();
                engine.clock.charge_det(1).expect("can_eval checked the cost");
                since_check += 1;
                let mut need_check = since_check >= config.check_interval_det_evals;
                if outcome.accepted
                    && filter.is_promising(outcome.proposed_value, annealer.state().best_value)
                {
                    let candidate = annealer.state().current.clone();
                    if let AdmitOutcome::Admitted { .. } =
                        engine.admit(candidate, outcome.proposed_value)
                    {
                        need_check = true;
                    }
                }
                if need_check {
                    confidence = engine.ensure_confident(search_cap);
                    since_check = 0;
                }
            }
        }
    }

    engine.trace.push(
        engine.clock.spent(),
        TraceEvent::FinalizeStarted { elite_size: engine.elite.len() },
    );

    let chosen = match config.strategy {
        Strategy::DcopOnly => {
            // The deterministic incumbent is the answer; the reserve only
            // estimates its expected objective.
            let best = annealer.state().best.clone();
            let best_value = annealer.state().best_value;
            if !engine.elite.contains(&best) {
                engine.elite.force_admit(best.clone(), best_value, config.n0);
                engine.trace.push(
                    engine.clock.spent(),
                    TraceEvent::CandidateAdmitted {
                        det_value: best_value,
                        elite_size: engine.elite.len(),
                        evicted: true,
                    },
                );
            }
            let idx = engine.elite.position(&best).expect("incumbent admitted above");
            let reserve = engine.clock.remaining_replications();
            if reserve > 0 {
                engine.grant_reps(&[(idx, reserve)], engine.total_cap());
            }
            idx
        }
        Strategy::FixedInterval | Strategy::SimulateAllPromising => {
            // Baseline finalization: top everyone up to n0, then spread the
            // reserve equally.
            let topups = engine.topup_requests();
            engine.grant_reps(&topups, engine.total_cap());
            let reserve = engine.clock.remaining_replications();
            if reserve > 0 {
                let requests = engine.equal_spread(reserve);
                engine.grant_reps(&requests, engine.total_cap());
            }
            engine.final_choice()
        }
        Strategy::OcbaGuided => {
            // Spend the reserve on OCBA rounds over the final elite set.
            loop {
                let topups = engine.topup_requests();
                if !topups.is_empty() {
                    let wanted: u64 = topups.iter().map(|&(_, w)| w).sum();
                    if engine.grant_reps(&topups, engine.total_cap()) < wanted {
                        break;
                    }
                }
                let remaining = engine.clock.remaining_replications();
                if remaining == 0 {
                    break;
                }
                if engine.elite.len() == 1 {
                    engine.grant_reps(&[(0, remaining)], engine.total_cap());
                    break;
                }
                let beliefs = engine.beliefs().expect("topped up above");
                let delta = config.ocba_delta.min(remaining);
                let requests: Vec<(usize, u64)> = ocba_allocate(&beliefs, delta)
                    .additional_reps
                    .iter()
                    .enumerate()
                    .filter(|&(_, &r)| r > 0)
                    .map(|(i, &r)| (i, r))
                    .collect();
                let granted = engine.grant_reps(&requests, engine.total_cap());
                engine.trace.push(
                    engine.clock.spent(),
                    TraceEvent::OcbaRound { requested: delta, granted },
                );
                if granted < delta {
                    break;
                }
            }
            engine.final_choice()
        }
    };

    Ok(engine.result_for(chosen))
}
