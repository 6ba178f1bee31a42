//! Run traces: an ordered log of (budget_spent, event) pairs that records
//! admissions, confidence checks, OCBA rounds, phase switches, finalization,
//! and the returned solution. Serializes to CSV for plotting.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Search,
    Simulate,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Search => "search",
            Phase::Simulate => "simulate",
        })
    }
}

/// Only the ocba-guided strategy emits `PhaseSwitch`: a switch back to
/// search certifies that the preceding confidence check passed.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    CandidateAdmitted {
        det_value: f64,
        elite_size: usize,
        evicted: bool,
    },
    EocChecked {
        eoc: f64,
        threshold: f64,
        confident: bool,
    },
    OcbaRound {
        requested: u64,
        granted: u64,
    },
    PhaseSwitch {
        to: Phase,
    },
    FinalizeStarted {
        elite_size: usize,
    },
    Returned {
        best_mean: f64,
        replications_on_best: u64,
    },
}

impl TraceEvent {
    pub fn kind(&self) -> &'static str {
        match self {
            TraceEvent::CandidateAdmitted { .. } => "candidate_admitted",
            TraceEvent::EocChecked { .. } => "eoc_checked",
            TraceEvent::OcbaRound { .. } => "ocba_round",
            TraceEvent::PhaseSwitch { .. } => "phase_switch",
            TraceEvent::FinalizeStarted { .. } => "finalize_started",
            TraceEvent::Returned { .. } => "returned",
        }
    }

    /// Space-separated `key=value` pairs; values never contain commas, so
    /// the CSV needs no quoting.
    pub fn payload(&self) -> String {
        match self {
            TraceEvent::CandidateAdmitted {
                det_value,
                elite_size,
                evicted,
            } => format!("det_value={det_value} elite_size={elite_size} evicted={evicted}"),
            TraceEvent::EocChecked {
                eoc,
                threshold,
                confident,
            } => format!("eoc={eoc} threshold={threshold} confident={confident}"),
            TraceEvent::OcbaRound { requested, granted } => {
                format!("requested={requested} granted={granted}")
            }
            TraceEvent::PhaseSwitch { to } => format!("to={to}"),
            TraceEvent::FinalizeStarted { elite_size } => format!("elite_size={elite_size}"),
            TraceEvent::Returned {
                best_mean,
                replications_on_best,
            } => format!("best_mean={best_mean} replications_on_best={replications_on_best}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    events: Vec<(f64, TraceEvent)>,
}

impl RunTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, budget_spent: f64, event: TraceEvent) {
        if let Some((last, _)) = self.events.last() {
            assert!(
                budget_spent >= *last,
                "trace budget regressed: {budget_spent} after {last}"
            );
        }
        self.events.push((budget_spent, event));
    }

    pub fn events(&self) -> &[(f64, TraceEvent)] {
        &self.events
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("budget_spent,event_kind,payload\n");
        for (spent, event) in &self.events {
            out.push_str(&format!("{spent},{},{}\n", event.kind(), event.payload()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout_is_stable() {
        let mut trace = RunTrace::new();
        trace.push(
            0.01,
            TraceEvent::CandidateAdmitted {
                det_value: 12.5,
                elite_size: 1,
                evicted: false,
            },
        );
        trace.push(
            5.01,
            TraceEvent::EocChecked {
                eoc: 0.25,
                threshold: 0.5,
                confident: true,
            },
        );
        trace.push(5.01, TraceEvent::PhaseSwitch { to: Phase::Search });
        trace.push(
            9.0,
            TraceEvent::Returned {
                best_mean: 11.875,
                replications_on_best: 40,
            },
        );
        let csv = trace.to_csv();
        let expected = "budget_spent,event_kind,payload\n\
            0.01,candidate_admitted,det_value=12.5 elite_size=1 evicted=false\n\
            5.01,eoc_checked,eoc=0.25 threshold=0.5 confident=true\n\
            5.01,phase_switch,to=search\n\
            9,returned,best_mean=11.875 replications_on_best=40\n";
        assert_eq!(csv, expected);
    }

    #[test]
    #[should_panic(expected = "budget regressed")]
    fn budget_must_not_regress() {
        let mut trace = RunTrace::new();
        trace.push(2.0, TraceEvent::FinalizeStarted { elite_size: 3 });
        trace.push(1.0, TraceEvent::PhaseSwitch { to: Phase::Simulate });
    }

    #[test]
    fn equal_budget_events_are_allowed() {
        let mut trace = RunTrace::new();
        trace.push(1.0, TraceEvent::OcbaRound { requested: 20, granted: 20 });
        trace.push(1.0, TraceEvent::OcbaRound { requested: 20, granted: 0 });
        assert_eq!(trace.events().len(), 2);
    }
}
