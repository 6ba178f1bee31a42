//! Budget accounting in simulation-replication units.
//!
//! One budget unit buys one simulation replication. A deterministic
//! evaluation costs `det_eval_cost` units (typically far less than 1, since
//! the deterministic objective is a single function evaluation). The clock
//! only counts; the engine decides what to do when the budget runs out.

use thiserror::Error;

/// Tolerance for the budget boundary. `spent` is recomputed from integer
/// counters with one multiplication, so any float error stays far below this.
pub const BUDGET_EPS: f64 = 1e-9;

/// Raised by a charge that would overdraw the budget. Signals the engine to
/// stop searching and finalize.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("budget exhausted: spent {spent} of {total}, requested {requested} more")]
pub struct BudgetExhausted {
    pub spent: f64,
    pub total: u64,
    pub requested: f64,
}

/// Tracks budget consumption. Counters only increase.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetClock {
    sim_replications_used: u64,
    det_evaluations_used: u64,
    total_budget: u64,
    det_eval_cost: f64,
}

impl BudgetClock {
    /// New clock with nothing spent.
    ///
    /// Panics if `total_budget` is zero or `det_eval_cost` is negative or
    /// non-finite.
    pub fn new(total_budget: u64, det_eval_cost: f64) -> Self {
        assert!(total_budget > 0, "total_budget must be positive");
        assert!(
            det_eval_cost.is_finite() && det_eval_cost >= 0.0,
            "det_eval_cost must be finite and nonnegative"
        );
        Self {
            sim_replications_used: 0,
            det_evaluations_used: 0,
            total_budget,
            det_eval_cost,
        }
    }

    pub fn sim_replications_used(&self) -> u64 {
        self.sim_replications_used
    }

    pub fn det_evaluations_used(&self) -> u64 {
        self.det_evaluations_used
    }

    pub fn total_budget(&self) -> u64 {
        self.total_budget
    }

    pub fn det_eval_cost(&self) -> f64 {
        self.det_eval_cost
    }

    /// Units spent so far, recomputed from the counters.
    pub fn spent(&self) -> f64 {
        self.sim_replications_used as f64 + self.det_evaluations_used as f64 * self.det_eval_cost
    }

    /// Units still available.
    pub fn remaining(&self) -> f64 {
        (self.total_budget as f64 - self.spent()).max(0.0)
    }

    /// Whole simulation replications still affordable.
    pub fn remaining_replications(&self) -> u64 {
        (self.remaining() + BUDGET_EPS).floor() as u64
    }

    fn try_spend(&self, cost: f64) -> Result<(), BudgetExhausted> {
        if self.spent() + cost <= self.total_budget as f64 + BUDGET_EPS {
            Ok(())
        } else {
            Err(BudgetExhausted {
                spent: self.spent(),
                total: self.total_budget,
                requested: cost,
            })
        }
    }

    /// Charge `n` simulation replications.
    pub fn charge_sim(&mut self, n: u64) -> Result<(), BudgetExhausted> {
        assert!(n > 0, "charge_sim requires n > 0");
        self.try_spend(n as f64)?;
        self.sim_replications_used += n;
        Ok(())
    }

    /// Charge `n` deterministic evaluations (cost `n * det_eval_cost`).
    pub fn charge_det(&mut self, n: u64) -> Result<(), BudgetExhausted> {
        assert!(n > 0, "charge_det requires n > 0");
        self.try_spend(n as f64 * self.det_eval_cost)?;
        self.det_evaluations_used += n;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charge_sim_accumulates() {
        let mut clock = BudgetClock::new(100, 0.0);
        clock.charge_sim(10).unwrap();
        assert_eq!(clock.sim_replications_used(), 10);
        assert!((clock.spent() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn charge_sim_at_boundary_fails() {
        let mut clock = BudgetClock::new(100, 0.0);
        clock.charge_sim(100).unwrap();
        let err = clock.charge_sim(1).unwrap_err();
        assert_eq!(err.total, 100);
        assert_eq!(clock.sim_replications_used(), 100);
    }

    #[test]
    fn mixed_charges_land_exactly_on_budget() {
        // 95 replications + 50 deterministic evaluations at 0.1 = 100 exactly.
        let mut clock = BudgetClock::new(100, 0.1);
        clock.charge_sim(95).unwrap();
        clock.charge_det(50).unwrap();
        assert!((clock.spent() - 100.0).abs() < BUDGET_EPS);
        assert!(clock.charge_sim(1).is_err());
        assert!(clock.charge_det(1).is_err());
    }

    #[test]
    fn zero_cost_det_evaluations_are_free() {
        let mut clock = BudgetClock::new(10, 0.0);
        clock.charge_det(1000).unwrap();
        assert_eq!(clock.spent(), 0.0);
        assert_eq!(clock.det_evaluations_used(), 1000);
    }

    #[test]
    fn det_cost_converts_to_units() {
        let mut clock = BudgetClock::new(10, 0.1);
        clock.charge_det(10).unwrap();
        assert!((clock.spent() - 1.0).abs() < BUDGET_EPS);
    }

    #[test]
    fn det_charge_just_past_budget_fails() {
        // 99.95 spent, one more 0.1-unit evaluation would reach 100.05.
        let mut clock = BudgetClock::new(100, 0.1);
        clock.charge_sim(95).unwrap();
        clock.charge_det(49).unwrap();
        assert!((clock.spent() - 99.9).abs() < 1e-9);
        // 99.9 + 0.1 = 100.0 still fits; the next one does not.
        clock.charge_det(1).unwrap();
        let err = clock.charge_det(1).unwrap_err();
        assert!(err.requested > 0.0);
    }

    #[test]
    fn remaining_replications_floor() {
        let mut clock = BudgetClock::new(10, 0.25);
        clock.charge_det(3).unwrap(); // spent 0.75
        assert_eq!(clock.remaining_replications(), 9);
    }
}
