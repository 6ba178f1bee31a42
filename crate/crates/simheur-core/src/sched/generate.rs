//! Random instance generation with the TF/RDD due-date scheme: due dates are
//! drawn uniformly around the expected average completion time, with the
//! tardiness factor `TF` shifting them earlier (tighter) and the relative
//! range `RDD` spreading them.

use super::{Instance, Job};
use crate::rng::substream;
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    /// Mean processing durations are drawn uniformly from `[dur_lo, dur_hi)`.
    pub dur_lo: f64,
    pub dur_hi: f64,
    /// Setup times are drawn uniformly from `[setup_lo, setup_hi)`.
    pub setup_lo: f64,
    pub setup_hi: f64,
    /// Coefficient of variation applied to every job.
    pub cv: f64,
    /// Tardiness factor: how tight due dates are on average.
    pub tardiness_factor: f64,
    /// Relative range of due dates around their center.
    pub due_date_range: f64,
    pub w_tardiness: f64,
    pub w_makespan: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            dur_lo: 10.0,
            dur_hi: 50.0,
            setup_lo: 1.0,
            setup_hi: 10.0,
            cv: 0.5,
            tardiness_factor: 0.4,
            due_date_range: 0.6,
            w_tardiness: 1.0,
            w_makespan: 0.1,
        }
    }
}

/// Generates a random instance. The same `(num_jobs, num_machines, seed,
/// params)` always produces the identical instance.
///
/// Due dates are uniform on `C̄·(1 − TF ± RDD/2)` clamped at zero, where
/// `C̄ = (Σ mean durations + avg setup · num_jobs) / num_machines`
/// approximates the average machine completion time.
pub fn generate_instance(
    num_jobs: usize,
    num_machines: usize,
    seed: u64,
    params: &GeneratorParams,
) -> Instance {
    assert!(num_jobs >= 1, "num_jobs must be at least 1");
    assert!(num_machines >= 1, "num_machines must be at least 1");
    assert!(
        params.dur_lo > 0.0 && params.dur_hi >= params.dur_lo,
        "duration range must be positive"
    );
    assert!(
        params.setup_lo >= 0.0 && params.setup_hi >= params.setup_lo,
        "setup range must be nonnegative"
    );

    let mut rng = substream(seed, 0).rng();
    let draw = |rng: &mut rand_chacha::ChaCha8Rng, lo: f64, hi: f64| {
        if hi > lo {
            rng.random_range(lo..hi)
        } else {
            lo
        }
    };

    let means: Vec<f64> = (0..num_jobs)
        .map(|_| draw(&mut rng, params.dur_lo, params.dur_hi))
        .collect();

    // Independent draws per direction make the matrix asymmetric in general.
    let setup: Vec<Vec<f64>> = (0..num_jobs + 1)
        .map(|_| {
            (0..num_jobs)
                .map(|_| draw(&mut rng, params.setup_lo, params.setup_hi))
                .collect()
        })
        .collect();

    let setup_sum: f64 = setup.iter().flatten().sum();
    let avg_setup = setup_sum / (setup.len() * num_jobs) as f64;
    let mean_sum: f64 = means.iter().sum();
    let c_bar = (mean_sum + avg_setup * num_jobs as f64) / num_machines as f64;

    let center = 1.0 - params.tardiness_factor;
    let lo = (c_bar * (center - params.due_date_range / 2.0)).max(0.0);
    let hi = (c_bar * (center + params.due_date_range / 2.0)).max(0.0);
    let dues: Vec<f64> = (0..num_jobs).map(|_| draw(&mut rng, lo, hi)).collect();

    let jobs = means
        .into_iter()
        .zip(dues)
        .enumerate()
        .map(|(id, (mean_duration, due_date))| Job {
            id,
            mean_duration,
            cv: params.cv,
            due_date,
        })
        .collect();

    Instance::new(jobs, num_machines, setup, params.w_tardiness, params.w_makespan)
        .expect("generated instances satisfy the instance invariants")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let params = GeneratorParams::default();
        let a = generate_instance(12, 3, 99, &params);
        let b = generate_instance(12, 3, 99, &params);
        assert_eq!(a, b);
        let c = generate_instance(12, 3, 100, &params);
        assert_ne!(a, c);
    }

    #[test]
    fn dimensions_and_ranges() {
        let params = GeneratorParams::default();
        let inst = generate_instance(20, 4, 7, &params);
        assert_eq!(inst.num_jobs(), 20);
        assert_eq!(inst.num_machines(), 4);
        assert_eq!(inst.setup().len(), 21);
        for job in inst.jobs() {
            assert!(job.mean_duration >= params.dur_lo && job.mean_duration < params.dur_hi);
            assert_eq!(job.cv, params.cv);
            assert!(job.due_date >= 0.0);
        }
        for row in inst.setup() {
            assert_eq!(row.len(), 20);
            for &s in row {
                assert!(s >= params.setup_lo && s < params.setup_hi);
            }
        }
    }

    #[test]
    fn degenerate_due_window_collapses_to_center() {
        // TF = 0 and RDD = 0: every due date equals C_bar exactly.
        let params = GeneratorParams {
            tardiness_factor: 0.0,
            due_date_range: 0.0,
            ..GeneratorParams::default()
        };
        let inst = generate_instance(5, 2, 3, &params);
        let mean_sum: f64 = inst.jobs().iter().map(|j| j.mean_duration).sum();
        let setup_sum: f64 = inst.setup().iter().flatten().sum();
        let avg_setup = setup_sum / (inst.setup().len() * inst.num_jobs()) as f64;
        let c_bar = (mean_sum + avg_setup * inst.num_jobs() as f64) / inst.num_machines() as f64;
        for job in inst.jobs() {
            assert!((job.due_date - c_bar).abs() < 1e-9);
        }
    }

    #[test]
    fn high_tf_tightens_due_dates() {
        let loose = generate_instance(
            30,
            2,
            5,
            &GeneratorParams {
                tardiness_factor: 0.0,
                ..GeneratorParams::default()
            },
        );
        let tight = generate_instance(
            30,
            2,
            5,
            &GeneratorParams {
                tardiness_factor: 0.8,
                ..GeneratorParams::default()
            },
        );
        let avg = |inst: &Instance| {
            inst.jobs().iter().map(|j| j.due_date).sum::<f64>() / inst.num_jobs() as f64
        };
        assert!(avg(&tight) < avg(&loose));
    }
}
