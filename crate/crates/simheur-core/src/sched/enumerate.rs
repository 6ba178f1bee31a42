//! Exhaustive schedule enumeration for small instances, used by the oracle
//! command and ground-truth tests. A schedule is an assignment of jobs to
//! machines plus an order on each machine, so there are
//! `n! * C(n + m - 1, m - 1)` schedules for `n` jobs on `m` machines.

use super::Schedule;
use itertools::Itertools;

/// Largest enumeration size the oracle path accepts before refusing.
pub const ENUMERATION_CAP: u128 = 2_000_000;

/// `n! * C(n + m - 1, m - 1)`, or `None` on u128 overflow.
pub fn enumeration_count(num_jobs: usize, num_machines: usize) -> Option<u128> {
    if num_machines == 0 {
        return Some(if num_jobs == 0 { 1 } else { 0 });
    }
    let mut count: u128 = 1;
    for k in 1..=num_jobs as u128 {
        count = count.checked_mul(k)?;
    }
    // C(n + m - 1, m - 1) multiplied incrementally; each prefix product of
    // the binomial recurrence is itself a binomial, so division is exact.
    let n = num_jobs as u128;
    let m = num_machines as u128;
    let mut binom: u128 = 1;
    for i in 1..m {
        binom = binom.checked_mul(n + i)?;
        binom /= i;
    }
    count.checked_mul(binom)
}

/// Visits every distinct schedule exactly once, in a deterministic order.
/// Callers must bound the size beforehand via [`enumeration_count`].
pub fn for_each_schedule(
    num_jobs: usize,
    num_machines: usize,
    mut visit: impl FnMut(&Schedule),
) {
    assert!(num_machines >= 1, "need at least one machine");
    let mut assignment = vec![0usize; num_jobs];
    loop {
        let mut lists: Vec<Vec<usize>> = vec![Vec::new(); num_machines];
        for (job, &machine) in assignment.iter().enumerate() {
            lists[machine].push(job);
        }
        let per_machine_orders: Vec<Vec<Vec<usize>>> = lists
            .iter()
            .map(|jobs| jobs.iter().copied().permutations(jobs.len()).collect())
            .collect();
        for combo in per_machine_orders
            .iter()
            .map(|orders| orders.iter())
            .multi_cartesian_product()
        {
            let schedule = Schedule::new(combo.into_iter().cloned().collect());
            visit(&schedule);
        }
        // Advance the base-m assignment counter.
        let mut pos = 0;
        loop {
            if pos == num_jobs {
                return;
            }
            assignment[pos] += 1;
            if assignment[pos] < num_machines {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
    }
}
