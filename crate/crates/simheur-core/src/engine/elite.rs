//! Fixed-capacity elite set: the most promising solutions found so far, each
//! carrying the simulation statistics accumulated while it stayed in the set.
//! Statistics are discarded on eviction; a readmitted solution starts fresh.

use crate::stats::SampleStats;

#[derive(Debug, Clone)]
pub struct EliteEntry<S> {
    pub solution: S,
    pub det_value: f64,
    pub stats: SampleStats,
    /// Unique per admission; replication RNG streams are derived from it, so
    /// a readmitted solution draws fresh randomness.
    pub admission_id: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdmitOutcome {
    /// Inserted; `evicted` tells whether an incumbent was displaced.
    Admitted { evicted: bool },
    /// Structurally equal solution already present; set unchanged.
    Duplicate,
    /// Set full and the candidate is not better than the worst incumbent.
    Rejected,
}

#[derive(Debug, Clone)]
pub struct EliteSet<S> {
    capacity: usize,
    entries: Vec<EliteEntry<S>>,
    next_admission_id: u64,
}

impl<S: Clone + PartialEq> EliteSet<S> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "elite capacity must be positive");
        Self {
            capacity,
            entries: Vec::with_capacity(capacity),
            next_admission_id: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[EliteEntry<S>] {
        &self.entries
    }

    pub fn entry_mut(&mut self, index: usize) -> &mut EliteEntry<S> {
        &mut self.entries[index]
    }

    pub fn contains(&self, solution: &S) -> bool {
        self.entries.iter().any(|e| &e.solution == solution)
    }

    pub fn position(&self, solution: &S) -> Option<usize> {
        self.entries.iter().position(|e| &e.solution == solution)
    }

    /// Comparison key of an incumbent for eviction and selection: the
    /// posterior mean once the entry has at least `n0` replications, its
    /// deterministic value before that.
    pub fn entry_key(entry: &EliteEntry<S>, n0: u64) -> f64 {
        if entry.stats.n() >= n0 {
            entry.stats.mean()
        } else {
            entry.det_value
        }
    }

    /// Index of the entry with the worst (largest) key; ties resolve to the
    /// first such entry.
    fn worst_index(&self, n0: u64) -> usize {
        let mut worst = 0;
        let mut worst_key = f64::NEG_INFINITY;
        for (i, entry) in self.entries.iter().enumerate() {
            let key = Self::entry_key(entry, n0);
            if key > worst_key {
                worst_key = key;
                worst = i;
            }
        }
        worst
    }

    /// Admission rule: duplicates leave the set unchanged; below capacity
    /// every candidate enters; at capacity the candidate must beat the worst
    /// incumbent key to evict it. New entries start with empty statistics.
    pub fn admit(&mut self, candidate: S, det_value: f64, n0: u64) -> AdmitOutcome {
        if self.contains(&candidate) {
            return AdmitOutcome::Duplicate;
        }
        if self.entries.len() < self.capacity {
            self.push(candidate, det_value);
            return AdmitOutcome::Admitted { evicted: false };
        }
        let worst = self.worst_index(n0);
        if det_value < Self::entry_key(&self.entries[worst], n0) {
            self.entries.remove(worst);
            self.push(candidate, det_value);
            AdmitOutcome::Admitted { evicted: true }
        } else {
            AdmitOutcome::Rejected
        }
    }

    /// Unconditional admission, evicting the worst incumbent when full. Used
    /// at finalization to guarantee the returned solution sits in the set.
    pub fn force_admit(&mut self, candidate: S, det_value: f64, n0: u64) -> AdmitOutcome {
        match self.admit(candidate.clone(), det_value, n0) {
            AdmitOutcome::Rejected => {
                let worst = self.worst_index(n0);
                self.entries.remove(worst);
                self.push(candidate, det_value);
                AdmitOutcome::Admitted { evicted: true }
            }
            other => other,
        }
    }

    fn push(&mut self, solution: S, det_value: f64) {
        self.entries.push(EliteEntry {
            solution,
            det_value,
            stats: SampleStats::new(),
            admission_id: self.next_admission_id,
        });
        self.next_admission_id += 1;
    }
}
