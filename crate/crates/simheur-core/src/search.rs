//! Deterministic metaheuristic: simulated annealing over schedules with
//! geometric cooling, plus the promising-solution filter that decides which
//! accepted candidates are worth simulating.
//!
//! The annealer itself is generic over [`NeighborhoodProblem`]; the
//! schedule-specific pieces are [`initial_solution`] (earliest-due-date
//! greedy) and [`neighbor`] (swap / reinsert / inter-machine move).

use crate::problem::NeighborhoodProblem;
use crate::rng::RngStream;
use crate::sched::{Instance, Schedule};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Simulated-annealing parameters. The initial temperature is
/// `initial_temp_fraction` times the initial objective; every step multiplies
/// the temperature by `cooling_rate`; after `restart_after` consecutive
/// non-improving steps the temperature is reset to its initial value.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SaParams {
    pub initial_temp_fraction: f64,
    pub cooling_rate: f64,
    pub restart_after: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            initial_temp_fraction: 0.1,
            cooling_rate: 0.999,
            restart_after: 2000,
        }
    }
}

/// A candidate is promising when its deterministic objective is within
/// `relative_gap` of the best value seen so far.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PromisingFilter {
    pub relative_gap: f64,
}

impl PromisingFilter {
    pub fn new(relative_gap: f64) -> Self {
        assert!(relative_gap >= 0.0, "relative_gap must be nonnegative");
        Self { relative_gap }
    }

    pub fn is_promising(&self, det_value: f64, best_value: f64) -> bool {
        if self.relative_gap.is_infinite() {
            return true;
        }
        det_value <= (1.0 + self.relative_gap) * best_value
    }
}

#[derive(Debug, Clone)]
pub struct SearchState<S> {
    pub current: S,
    pub current_value: f64,
    pub best: S,
    pub best_value: f64,
    pub temperature: f64,
    pub iterations: u64,
}

/// What one annealing step did, in stream order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub proposed_value: f64,
    pub accepted: bool,
    /// The proposal strictly improved on the best value seen so far.
    pub improved: bool,
}

pub(crate) fn acceptance_probability(delta: f64, temperature: f64) -> f64 {
    if delta <= 0.0 {
        1.0
    } else {
        (-delta / temperature).exp()
    }
}

/// Single-threaded simulated annealing over one problem instance. All
/// randomness comes from the stream handed to [`Annealer::new`], so a run is
/// a pure function of (problem, params, stream).
pub struct Annealer<'a, P: NeighborhoodProblem> {
    problem: &'a P,
    params: SaParams,
    state: SearchState<P::Solution>,
    rng: ChaCha8Rng,
    initial_temperature: f64,
    non_improving: u64,
}

impl<'a, P: NeighborhoodProblem> Annealer<'a, P> {
    /// Builds the initial state from the problem's construction heuristic.
    /// The caller owes the budget clock one deterministic evaluation for it.
    pub fn new(problem: &'a P, params: SaParams, stream: RngStream) -> Self {
        assert!(
            params.initial_temp_fraction > 0.0 && params.initial_temp_fraction.is_finite(),
            "initial_temp_fraction must be positive"
        );
        assert!(
            params.cooling_rate > 0.0 && params.cooling_rate < 1.0,
            "cooling_rate must lie in (0, 1)"
        );
        assert!(params.restart_after > 0, "restart_after must be positive");
        let current = problem.initial_solution();
        let current_value = problem.deterministic_objective(&current);
        // A zero initial objective would freeze the acceptance rule.
        let initial_temperature = (params.initial_temp_fraction * current_value).max(1e-12);
        let state = SearchState {
            best: current.clone(),
            best_value: current_value,
            current,
            current_value,
            temperature: initial_temperature,
            iterations: 0,
        };
        Self {
            problem,
            params,
            state,
            rng: stream.rng(),
            initial_temperature,
            non_improving: 0,
        }
    }

    pub fn state(&self) -> &SearchState<P::Solution> {
        &self.state
    }

    /// One Metropolis step. Costs exactly one deterministic evaluation,
    /// which the caller charges to the budget clock.
    pub fn step(&mut self) -> StepOutcome {
        let proposal = self.problem.neighbor(&self.state.current, &mut self.rng);
        let proposed_value = self.problem.deterministic_objective(&proposal);
        let delta = proposed_value - self.state.current_value;
        let accepted = if delta <= 0.0 {
            true
        } else {
            self.rng.random::<f64>() < acceptance_probability(delta, self.state.temperature)
        };
        let improved = proposed_value < self.state.best_value;
        if accepted {
            self.state.current = proposal;
            self.state.current_value = proposed_value;
            if improved {
                self.state.best = self.state.current.clone();
                self.state.best_value = proposed_value;
            }
        }
        self.state.temperature *= self.params.cooling_rate;
        self.state.iterations += 1;
        if improved {
            self.non_improving = 0;
        } else {
            self.non_improving += 1;
            if self.non_improving >= self.params.restart_after {
                self.state.temperature = self.initial_temperature;
                self.non_improving = 0;
            }
        }
        StepOutcome {
            proposed_value,
            accepted,
            improved,
        }
    }

    /// Steps until `stop` returns true (checked before every step). Calls
    /// `on_promising` for each accepted solution the filter lets through.
    pub fn run_until(
        &mut self,
        filter: &PromisingFilter,
        mut stop: impl FnMut(&SearchState<P::Solution>) -> bool,
        mut on_promising: impl FnMut(&P::Solution, f64),
    ) {
        while !stop(&self.state) {
            let outcome = self.step();
            if outcome.accepted
                && filter.is_promising(outcome.proposed_value, self.state.best_value)
            {
                on_promising(&self.state.current, outcome.proposed_value);
            }
        }
    }
}

/// Earliest-due-date construction: jobs sorted by due date (ties by id) are
/// appended greedily to whichever machine finishes them soonest, setup
/// included. First machine wins ties.
pub fn initial_solution(instance: &Instance) -> Schedule {
    let mut order: Vec<usize> = (0..instance.num_jobs()).collect();
    order.sort_by(|&a, &b| {
        instance.jobs()[a]
            .due_date
            .partial_cmp(&instance.jobs()[b].due_date)
            .expect("due dates are finite")
            .then(a.cmp(&b))
    });
    let m = instance.num_machines();
    let mut sequences: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut completion = vec![0.0f64; m];
    // Setup row per machine: 0 = idle, job + 1 after that job.
    let mut setup_row = vec![0usize; m];
    for job in order {
        let mut best_machine = 0;
        let mut best_finish = f64::INFINITY;
        for machine in 0..m {
            let finish = completion[machine]
                + instance.setup()[setup_row[machine]][job]
                + instance.jobs()[job].mean_duration;
            if finish < best_finish {
                best_finish = finish;
                best_machine = machine;
            }
        }
        sequences[best_machine].push(job);
        completion[best_machine] = best_finish;
        setup_row[best_machine] = job + 1;
    }
    Schedule::new(sequences)
}

/// One uniformly chosen move among the applicable kinds: intra-machine swap,
/// intra-machine remove-and-reinsert, inter-machine move to a random
/// position. Each kind, when applicable, always changes the schedule; if no
/// kind applies (one job on one machine) the input is returned unchanged.
pub fn neighbor(schedule: &Schedule, rng: &mut ChaCha8Rng) -> Schedule {
    #[derive(Clone, Copy, PartialEq)]
    enum Move {
        Swap,
        Reinsert,
        Shift,
    }

    let seqs = &schedule.machine_sequences;
    let multi_job_machines: Vec<usize> = (0..seqs.len()).filter(|&m| seqs[m].len() >= 2).collect();
    let nonempty_machines: Vec<usize> = (0..seqs.len()).filter(|&m| !seqs[m].is_empty()).collect();

    let mut kinds = Vec::with_capacity(3);
    if !multi_job_machines.is_empty() {
        kinds.push(Move::Swap);
        kinds.push(Move::Reinsert);
    }
    if seqs.len() >= 2 && !nonempty_machines.is_empty() {
        kinds.push(Move::Shift);
    }
    if kinds.is_empty() {
        return schedule.clone();
    }

    let mut out = schedule.clone();
    match kinds[rng.random_range(0..kinds.len())] {
        Move::Swap => {
            let machine = multi_job_machines[rng.random_range(0..multi_job_machines.len())];
            let seq = &mut out.machine_sequences[machine];
            let i = rng.random_range(0..seq.len());
            let mut j = rng.random_range(0..seq.len() - 1);
            if j >= i {
                j += 1;
            }
            seq.swap(i, j);
        }
        Move::Reinsert => {
            let machine = multi_job_machines[rng.random_range(0..multi_job_machines.len())];
            let seq = &mut out.machine_sequences[machine];
            let i = rng.random_range(0..seq.len());
            let job = seq.remove(i);
            // Position i would reproduce the input; skip over it.
            let mut pos = rng.random_range(0..seq.len());
            if pos >= i {
                pos += 1;
            }
            seq.insert(pos, job);
        }
        Move::Shift => {
            let source = nonempty_machines[rng.random_range(0..nonempty_machines.len())];
            let mut target = rng.random_range(0..seqs.len() - 1);
            if target >= source {
                target += 1;
            }
            let i = rng.random_range(0..out.machine_sequences[source].len());
            let job = out.machine_sequences[source].remove(i);
            let pos = rng.random_range(0..=out.machine_sequences[target].len());
            out.machine_sequences[target].insert(pos, job);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use crate::sched::{generate_instance, GeneratorParams, Job};
    use proptest::prelude::*;
    use std::collections::{HashSet, VecDeque};

    fn tiny_instance(num_jobs: usize, num_machines: usize, seed: u64) -> Instance {
        generate_instance(num_jobs, num_machines, seed, &GeneratorParams::default())
    }

    #[test]
    fn greedy_balances_identical_jobs() {
        let jobs = vec![
            Job { id: 0, mean_duration: 3.0, cv: 0.0, due_date: 10.0 },
            Job { id: 1, mean_duration: 3.0, cv: 0.0, due_date: 10.0 },
        ];
        let setup = vec![vec![0.0, 0.0]; 3];
        let instance = Instance::new(jobs, 2, setup, 1.0, 0.1).unwrap();
        let schedule = initial_solution(&instance);
        assert_eq!(schedule.machine_sequences, vec![vec![0], vec![1]]);
    }

    #[test]
    fn single_job_goes_to_machine_zero() {
        let jobs = vec![Job { id: 0, mean_duration: 3.0, cv: 0.0, due_date: 10.0 }];
        let instance = Instance::new(jobs, 2, vec![vec![0.0]; 2], 1.0, 0.1).unwrap();
        let schedule = initial_solution(&instance);
        assert_eq!(schedule.machine_sequences, vec![vec![0], vec![]]);
    }

    #[test]
    fn construction_is_valid_and_no_better_than_enumerated_optimum() {
        let instance = tiny_instance(4, 2, 11);
        let constructed = initial_solution(&instance);
        instance.validate_schedule(&constructed).unwrap();
        let constructed_value = instance.deterministic_objective(&constructed).unwrap();
        let mut optimum = f64::INFINITY;
        crate::sched::for_each_schedule(4, 2, |s| {
            optimum = optimum.min(instance.deterministic_objective(s).unwrap());
        });
        assert!(
            constructed_value >= optimum - 1e-9,
            "construction {constructed_value} beats enumerated optimum {optimum}"
        );
    }

    #[test]
    fn no_move_exists_for_one_job_one_machine() {
        let schedule = Schedule::new(vec![vec![0]]);
        let mut rng = substream(1, 0).rng();
        for _ in 0..10 {
            assert_eq!(neighbor(&schedule, &mut rng), schedule);
        }
    }

    #[test]
    fn acceptance_probability_examples() {
        // Downhill always accepted, ties too.
        assert_eq!(acceptance_probability(-1.0, 5.0), 1.0);
        assert_eq!(acceptance_probability(0.0, 5.0), 1.0);
        // Metropolis inversion: T = delta / ln 2 gives exactly 1/2.
        let delta = 3.7;
        let p = acceptance_probability(delta, delta / std::f64::consts::LN_2);
        assert!((p - 0.5).abs() < 1e-12);
        // Temperature near zero kills uphill moves.
        assert_eq!(acceptance_probability(1.0, 1e-300), 0.0);
    }

    /// Independent enumeration of every schedule reachable in one move,
    /// mirroring the move definitions rather than the sampler.
    fn one_move_successors(schedule: &Schedule) -> HashSet<Schedule> {
        let mut out = HashSet::new();
        let seqs = &schedule.machine_sequences;
        for m in 0..seqs.len() {
            let len = seqs[m].len();
            // Swaps.
            for i in 0..len {
                for j in i + 1..len {
                    let mut s = schedule.clone();
                    s.machine_sequences[m].swap(i, j);
                    out.insert(s);
                }
            }
            // Reinsertions.
            for i in 0..len {
                for pos in 0..len {
                    if pos == i {
                        continue;
                    }
                    let mut s = schedule.clone();
                    let job = s.machine_sequences[m].remove(i);
                    s.machine_sequences[m].insert(pos, job);
                    out.insert(s);
                }
            }
            // Inter-machine shifts.
            for target in 0..seqs.len() {
                if target == m {
                    continue;
                }
                for i in 0..len {
                    for pos in 0..=seqs[target].len() {
                        let mut s = schedule.clone();
                        let job = s.machine_sequences[m].remove(i);
                        s.machine_sequences[target].insert(pos, job);
                        out.insert(s);
                    }
                }
            }
        }
        out.remove(schedule);
        out
    }

    #[test]
    fn sampled_neighbors_agree_with_enumerated_moves() {
        let instance = tiny_instance(4, 2, 3);
        let schedule = initial_solution(&instance);
        let successors = one_move_successors(&schedule);
        let mut rng = substream(8, 0).rng();
        for _ in 0..500 {
            let n = neighbor(&schedule, &mut rng);
            instance.validate_schedule(&n).unwrap();
            assert_ne!(n, schedule, "applicable moves must change the schedule");
            assert!(successors.contains(&n), "sampler produced a non-move: {n}");
        }
    }

    #[test]
    fn move_graph_reaches_every_schedule_within_twenty_moves() {
        // All 120 schedules of a 4-job, 2-machine instance, BFS from each.
        let mut all = Vec::new();
        crate::sched::for_each_schedule(4, 2, |s| all.push(s.clone()));
        assert_eq!(all.len(), 120);
        for start in &all {
            let mut dist = std::collections::HashMap::new();
            dist.insert(start.clone(), 0u32);
            let mut queue = VecDeque::from([start.clone()]);
            while let Some(s) = queue.pop_front() {
                let d = dist[&s];
                for next in one_move_successors(&s) {
                    if !dist.contains_key(&next) {
                        dist.insert(next.clone(), d + 1);
                        queue.push_back(next);
                    }
                }
            }
            assert_eq!(dist.len(), 120, "move graph is not connected from {start}");
            let diameter = dist.values().max().unwrap();
            assert!(*diameter <= 20, "eccentricity {diameter} from {start}");
        }
    }

    #[test]
    fn annealing_is_deterministic_and_best_nonincreasing() {
        let instance = tiny_instance(10, 2, 21);
        let run = || {
            let mut annealer = Annealer::new(&instance, SaParams::default(), substream(5, 1));
            let mut log = Vec::new();
            let mut bests = Vec::new();
            for _ in 0..3000 {
                let outcome = annealer.step();
                log.push((
                    annealer.state().iterations,
                    outcome.accepted,
                    outcome.proposed_value.to_bits(),
                ));
                bests.push(annealer.state().best_value);
            }
            (log, bests)
        };
        let (log_a, bests_a) = run();
        let (log_b, _) = run();
        assert_eq!(log_a, log_b);
        for pair in bests_a.windows(2) {
            assert!(pair[1] <= pair[0], "best_value increased");
        }
        // A different stream takes a different trajectory.
        let mut other = Annealer::new(&instance, SaParams::default(), substream(5, 2));
        let log_c: Vec<_> = (0..3000)
            .map(|_| {
                let o = other.step();
                (other.state().iterations, o.accepted, o.proposed_value.to_bits())
            })
            .collect();
        assert_ne!(log_a, log_c);
    }

    #[test]
    fn stagnation_resets_temperature() {
        let instance = tiny_instance(6, 2, 2);
        let params = SaParams {
            restart_after: 50,
            ..SaParams::default()
        };
        let mut annealer = Annealer::new(&instance, params, substream(17, 0));
        let t0 = annealer.state().temperature;
        let mut reheated = false;
        let mut prev = t0;
        for _ in 0..20_000 {
            annealer.step();
            let t = annealer.state().temperature;
            if t > prev {
                assert!((t - t0).abs() < 1e-12, "reheat target {t} is not T0 {t0}");
                reheated = true;
            }
            prev = t;
        }
        assert!(reheated, "no reheat in 20k steps with restart_after = 50");
    }

    #[test]
    fn run_until_stop_immediately_does_nothing() {
        let instance = tiny_instance(5, 2, 4);
        let mut annealer = Annealer::new(&instance, SaParams::default(), substream(9, 0));
        let mut calls = 0;
        annealer.run_until(&PromisingFilter::new(0.02), |_| true, |_, _| calls += 1);
        assert_eq!(annealer.state().iterations, 0);
        assert_eq!(calls, 0);
    }

    #[test]
    fn infinite_gap_reports_every_accepted_step() {
        let instance = tiny_instance(8, 2, 6);
        let count_accepted = |gap: f64| {
            let mut annealer = Annealer::new(&instance, SaParams::default(), substream(31, 0));
            let mut reported = 0u64;
            annealer.run_until(
                &PromisingFilter::new(gap),
                |s| s.iterations >= 2000,
                |_, _| reported += 1,
            );
            reported
        };
        let mut annealer = Annealer::new(&instance, SaParams::default(), substream(31, 0));
        let mut accepted = 0u64;
        for _ in 0..2000 {
            if annealer.step().accepted {
                accepted += 1;
            }
        }
        assert_eq!(count_accepted(f64::INFINITY), accepted);
        assert!(accepted > 0);
    }

    #[test]
    fn zero_gap_reports_only_incumbents() {
        let instance = tiny_instance(12, 3, 13);
        let mut annealer = Annealer::new(&instance, SaParams::default(), substream(19, 0));
        let mut reports: Vec<f64> = Vec::new();
        annealer.run_until(
            &PromisingFilter::new(0.0),
            |s| s.iterations >= 5000,
            |_, v| reports.push(v),
        );
        // Every reported value is the incumbent best at report time, which
        // for a zero gap means the report values are exactly the strictly
        // decreasing chain of new best values (plus possible exact ties).
        let mut best_so_far = f64::INFINITY;
        let initial = Annealer::new(&instance, SaParams::default(), substream(19, 0))
            .state()
            .best_value;
        let mut best = initial;
        for &v in &reports {
            assert!(v <= best + 1e-15, "reported {v} above incumbent {best}");
            best = best.min(v);
            best_so_far = best_so_far.min(v);
        }
        assert!(!reports.is_empty(), "5000 steps should improve the EDD start");
        assert!(best < initial, "expected at least one strict improvement");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn neighbors_preserve_validity(
            jobs in 1usize..7,
            machines in 1usize..4,
            seed in any::<u64>(),
            moves in 1usize..30,
        ) {
            let instance = tiny_instance(jobs, machines, seed);
            let mut schedule = initial_solution(&instance);
            let mut rng = substream(seed, 99).rng();
            for _ in 0..moves {
                schedule = neighbor(&schedule, &mut rng);
                prop_assert!(instance.validate_schedule(&schedule).is_ok());
            }
        }
    }
}
