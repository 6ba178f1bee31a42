//! Bayesian ranking of simulated solutions: posteriors over true expected
//! objectives, the expected opportunity cost (EOC) of a candidate set, and
//! the OCBA replication-allocation rule.
//!
//! The posterior model is normal with a non-informative prior and plug-in
//! sample variance: after `n` replications with sample mean `m` and sample
//! variance `s²`, the unknown expected objective is believed to be
//! `N(m, s²/n)`. The EOC of a set is the expected gap between the solution
//! currently identified as best and the true best; we compute the standard
//! Bonferroni upper bound, which sums pairwise normal linear-loss terms
//! against the current best. Everything here minimizes.

use crate::stats::SampleStats;

/// Floor applied to the sample variance so posteriors stay proper even for
/// solutions whose replications all coincide (e.g. zero-variance instances).
pub fn variance_floor(mean: f64) -> f64 {
    1e-12 * (1.0 + mean * mean)
}

/// Floor applied to mean gaps in the OCBA ratio so ties do not divide by zero.
fn delta_floor(best_mean: f64) -> f64 {
    (1e-6 * best_mean.abs()).max(1e-9)
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Posterior over one solution's true expected objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Belief {
    n: u64,
    posterior_mean: f64,
    posterior_var: f64,
}

impl Belief {
    /// Posterior from accumulated replications. `None` until the solution has
    /// at least `n0` replications (variance estimates below that are noise).
    pub fn from_stats(stats: &SampleStats, n0: u64) -> Option<Belief> {
        if stats.n() < n0.max(1) {
            return None;
        }
        let mean = stats.mean();
        let var = stats.variance().max(variance_floor(mean));
        Some(Belief {
            n: stats.n(),
            posterior_mean: mean,
            posterior_var: var / stats.n() as f64,
        })
    }

    /// Direct construction from posterior parameters.
    pub fn with_posterior(n: u64, posterior_mean: f64, posterior_var: f64) -> Belief {
        assert!(n >= 1);
        assert!(posterior_var > 0.0, "posterior variance must be positive");
        assert!(posterior_mean.is_finite());
        Belief {
            n,
            posterior_mean,
            posterior_var,
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn posterior_mean(&self) -> f64 {
        self.posterior_mean
    }

    pub fn posterior_var(&self) -> f64 {
        self.posterior_var
    }

    /// Per-replication standard deviation `σ` implied by the posterior,
    /// i.e. `sqrt(n · posterior_var)`.
    pub fn replication_std(&self) -> f64 {
        (self.n as f64 * self.posterior_var).sqrt()
    }
}

/// Index of the belief with minimal posterior mean; ties go to the lowest
/// index.
pub fn select_best(beliefs: &[Belief]) -> usize {
    assert!(!beliefs.is_empty(), "select_best requires a nonempty list");
    let mut best = 0;
    for (i, b) in beliefs.iter().enumerate().skip(1) {
        if b.posterior_mean < beliefs[best].posterior_mean {
            best = i;
        }
    }
    best
}

/// Bonferroni upper bound on the expected opportunity cost of the set:
/// with `b` the current best, `Σ_{i≠b} E[(μ̃_b − μ̃_i)⁺]` where each term is
/// the normal linear loss `s_i·φ(z_i) − d_i·Φ(−z_i)` with
/// `d_i = mean_i − mean_b`, `s_i = sqrt(var_b + var_i)`, `z_i = d_i/s_i`.
/// Zero for a singleton.
pub fn eoc_bonferroni(beliefs: &[Belief]) -> f64 {
    assert!(!beliefs.is_empty(), "eoc_bonferroni requires a nonempty list");
    if beliefs.len() == 1 {
        return 0.0;
    }
    let b = select_best(beliefs);
    let best = &beliefs[b];
    let mut total = 0.0;
    for (i, belief) in beliefs.iter().enumerate() {
        if i == b {
            continue;
        }
        let d = belief.posterior_mean - best.posterior_mean;
        let s = (best.posterior_var + belief.posterior_var).sqrt();
        let z = d / s;
        total += s * normal_pdf(z) - d * normal_cdf(-z);
    }
    // Each linear-loss term is nonnegative; clamp away float residue.
    total.max(0.0)
}

/// How many additional replications each solution receives in one OCBA round.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub additional_reps: Vec<u64>,
}

impl Allocation {
    pub fn total(&self) -> u64 {
        self.additional_reps.iter().sum()
    }
}

/// Allocates `delta` further replications across the solutions by the OCBA
/// rule: for non-best `i`, cumulative targets obey
/// `N_i ∝ (σ_i/δ_{b,i})²` with `δ_{b,i}` the posterior-mean gap to the best,
/// and the best receives `N_b = σ_b · sqrt(Σ_{i≠b} (N_i/σ_i)²)`. Cumulative
/// targets are converted to increments by subtracting what each solution
/// already has, clamping at zero, and rounding by largest remainder so the
/// increments sum to exactly `delta`.
///
/// When every belief has the identical posterior mean and variance the rule
/// is undefined; the round falls back to an equal split (logged, not an
/// error).
pub fn ocba_allocate(beliefs: &[Belief], delta: u64) -> Allocation {
    assert!(beliefs.len() >= 2, "ocba_allocate requires at least 2 beliefs");
    assert!(delta >= 1, "ocba_allocate requires delta >= 1");

    let degenerate = beliefs.windows(2).all(|w| {
        w[0].posterior_mean == w[1].posterior_mean && w[0].posterior_var == w[1].posterior_var
    });
    if degenerate {
        log::debug!("degenerate beliefs: falling back to equal OCBA allocation");
        return equal_allocation(beliefs.len(), delta);
    }

    let b = select_best(beliefs);
    let best_mean = beliefs[b].posterior_mean;
    let floor = delta_floor(best_mean);

    // Unnormalized target weights; scale-invariant downstream.
    let mut weights = vec![0.0f64; beliefs.len()];
    for (i, belief) in beliefs.iter().enumerate() {
        if i == b {
            continue;
        }
        let gap = (belief.posterior_mean - best_mean).max(floor);
        let sigma = belief.replication_std().max(floor);
        let ratio = sigma / gap;
        weights[i] = ratio * ratio;
    }
    let sigma_b = beliefs[b].replication_std().max(floor);
    weights[b] = sigma_b
        * weights
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != b)
            .map(|(i, w)| {
                let sigma_i = beliefs[i].replication_std().max(floor);
                (w / sigma_i).powi(2)
            })
            .sum::<f64>()
            .sqrt();

    // Normalize by the largest weight to keep the arithmetic in range.
    let max_w = weights.iter().cloned().fold(f64::MIN, f64::max);
    let weight_sum: f64 = weights.iter().map(|w| w / max_w).sum();

    let current: Vec<f64> = beliefs.iter().map(|b| b.n as f64).collect();
    let total_after: f64 = current.iter().sum::<f64>() + delta as f64;

    // Cumulative targets, then clamp increments at zero.
    let raw: Vec<f64> = weights
        .iter()
        .zip(&current)
        .map(|(w, n)| (total_after * (w / max_w) / weight_sum - n).max(0.0))
        .collect();
    let raw_sum: f64 = raw.iter().sum();
    if raw_sum <= 0.0 {
        log::debug!("all OCBA targets already met: falling back to equal allocation");
        return equal_allocation(beliefs.len(), delta);
    }

    let quotas: Vec<f64> = raw.iter().map(|r| r * delta as f64 / raw_sum).collect();
    Allocation {
        additional_reps: largest_remainder(&quotas, delta),
    }
}

fn equal_allocation(k: usize, delta: u64) -> Allocation {
    let base = delta / k as u64;
    let extra = (delta % k as u64) as usize;
    Allocation {
        additional_reps: (0..k).map(|i| base + u64::from(i < extra)).collect(),
    }
}

/// Rounds nonnegative quotas to integers summing exactly to `delta`:
/// floor everything, then hand the leftover units to the largest fractional
/// parts (ties to the lowest index).
fn largest_remainder(quotas: &[f64], delta: u64) -> Vec<u64> {
    let mut reps: Vec<u64> = quotas.iter().map(|q| q.floor() as u64).collect();
    let assigned: u64 = reps.iter().sum();
    let mut leftover = delta.saturating_sub(assigned) as usize;
    if leftover > 0 {
        let mut order: Vec<usize> = (0..quotas.len()).collect();
        order.sort_by(|&a, &b| {
            let fa = quotas[a] - quotas[a].floor();
            let fb = quotas[b] - quotas[b].floor();
            fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
        });
        leftover = leftover.min(order.len());
        for &i in order.iter().take(leftover) {
            reps[i] += 1;
        }
    }
    // Floating error can leave or overshoot a unit; fix against the exact sum.
    let len = reps.len();
    let mut sum: u64 = reps.iter().sum();
    let mut idx = 0;
    while sum < delta {
        reps[idx % len] += 1;
        sum += 1;
        idx += 1;
    }
    while sum > delta {
        let i = reps.iter().position(|&r| r > 0).unwrap();
        reps[i] -= 1;
        sum -= 1;
    }
    reps
}
