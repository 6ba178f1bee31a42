//! Run configuration: budget, elite-set and confidence parameters, strategy
//! selection, and the strategy-specific knobs. Deserializes from TOML-style
//! structured config files; every field has a default.

use crate::search::SaParams;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Pure deterministic search; the finalize reserve only estimates the
    /// expected objective of the deterministic incumbent.
    DcopOnly,
    /// Alternate fixed search slices with replications spread equally over
    /// the elite set.
    FixedInterval,
    /// Give every admitted candidate a fixed number of replications at once.
    SimulateAllPromising,
    /// Confidence-driven switching with OCBA allocation.
    OcbaGuided,
}

pub const ALL_STRATEGIES: [Strategy; 4] = [
    Strategy::DcopOnly,
    Strategy::FixedInterval,
    Strategy::SimulateAllPromising,
    Strategy::OcbaGuided,
];

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::DcopOnly => "dcop-only",
            Strategy::FixedInterval => "fixed-interval",
            Strategy::SimulateAllPromising => "simulate-all-promising",
            Strategy::OcbaGuided => "ocba-guided",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("unknown strategy `{0}` (expected dcop-only, fixed-interval, simulate-all-promising, or ocba-guided)")]
pub struct UnknownStrategy(pub String);

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dcop-only" => Ok(Strategy::DcopOnly),
            "fixed-interval" => Ok(Strategy::FixedInterval),
            "simulate-all-promising" => Ok(Strategy::SimulateAllPromising),
            "ocba-guided" => Ok(Strategy::OcbaGuided),
            other => Err(UnknownStrategy(other.to_string())),
        }
    }
}

/// Whether `eoc_threshold` is compared against the EOC directly or scaled by
/// the magnitude of the best posterior mean first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    Absolute,
    RelativeToBestMean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub elite_capacity: usize,
    pub eoc_threshold: f64,
    pub threshold_mode: ThresholdMode,
    /// Minimum replications before an entry's posterior is trusted.
    pub n0: u64,
    /// Replications granted per OCBA round.
    pub ocba_delta: u64,
    /// Share of the budget reserved for finalization, in (0, 1).
    pub finalize_fraction: f64,
    /// Budget in simulation-replication units.
    pub total_budget: u64,
    /// Budget units charged per deterministic evaluation; must be positive,
    /// otherwise the search phase would never consume budget.
    pub det_eval_cost: f64,
    pub strategy: Strategy,
    /// ocba-guided: a confidence check is forced after this many
    /// deterministic evaluations without one.
    pub check_interval_det_evals: u64,
    /// fixed-interval: length of each search slice, in deterministic evals.
    pub interval_det_evals: u64,
    /// fixed-interval: replications spread equally over the elite per pause.
    pub interval_reps: u64,
    /// simulate-all-promising: replications granted on each admission.
    pub per_candidate_reps: u64,
    /// Candidates within this relative gap of the incumbent are promising.
    pub promising_gap: f64,
    pub sa: SaParams,
    /// Worker threads for simulation replications; results are identical
    /// regardless of the setting.
    pub sim_threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            elite_capacity: 10,
            eoc_threshold: 0.01,
            threshold_mode: ThresholdMode::RelativeToBestMean,
            n0: 5,
            ocba_delta: 20,
            finalize_fraction: 0.1,
            total_budget: 10_000,
            det_eval_cost: 0.01,
            strategy: Strategy::OcbaGuided,
            check_interval_det_evals: 500,
            interval_det_evals: 500,
            interval_reps: 100,
            per_candidate_reps: 10,
            promising_gap: 0.02,
            sa: SaParams::default(),
            sim_threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid config: {0}")]
pub struct InvalidConfig(pub String);

impl RunConfig {
    pub fn validate(&self) -> Result<(), InvalidConfig> {
        let fail = |msg: String| Err(InvalidConfig(msg));
        if self.elite_capacity == 0 {
            return fail("elite_capacity must be positive".into());
        }
        if !(self.eoc_threshold > 0.0) {
            return fail(format!("eoc_threshold {} must be positive", self.eoc_threshold));
        }
        if self.n0 == 0 {
            return fail("n0 must be positive".into());
        }
        if self.ocba_delta == 0 {
            return fail("ocba_delta must be positive".into());
        }
        if !(self.finalize_fraction > 0.0 && self.finalize_fraction < 1.0) {
            return fail(format!(
                "finalize_fraction {} must lie in (0, 1)",
                self.finalize_fraction
            ));
        }
        if self.total_budget == 0 {
            return fail("total_budget must be positive".into());
        }
        if !(self.det_eval_cost > 0.0 && self.det_eval_cost.is_finite()) {
            return fail(format!(
                "det_eval_cost {} must be positive and finite",
                self.det_eval_cost
            ));
        }
        if self.check_interval_det_evals == 0 {
            return fail("check_interval_det_evals must be positive".into());
        }
        if self.interval_det_evals == 0 {
            return fail("interval_det_evals must be positive".into());
        }
        if self.interval_reps == 0 {
            return fail("interval_reps must be positive".into());
        }
        if self.per_candidate_reps == 0 {
            return fail("per_candidate_reps must be positive".into());
        }
        if !(self.promising_gap >= 0.0) {
            return fail(format!("promising_gap {} must be nonnegative", self.promising_gap));
        }
        if !(self.sa.initial_temp_fraction > 0.0 && self.sa.initial_temp_fraction.is_finite()) {
            return fail(format!(
                "sa.initial_temp_fraction {} must be positive and finite",
                self.sa.initial_temp_fraction
            ));
        }
        if !(self.sa.cooling_rate > 0.0 && self.sa.cooling_rate < 1.0) {
            return fail(format!(
                "sa.cooling_rate {} must lie in (0, 1)",
                self.sa.cooling_rate
            ));
        }
        if self.sa.restart_after == 0 {
            return fail("sa.restart_after must be positive".into());
        }
        if self.sim_threads == 0 {
            return fail("sim_threads must be positive".into());
        }
        Ok(())
    }
}
