use alloc::collections::VecDeque;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Continue,
    Stop,
}

impl Decision {
    pub fn flipped(self) -> Self {
        match self {
            Decision::Continue => Decision::Stop,
            Decision::Stop => Decision::Continue,
        }
    }
}

/// Patience rule on the mean score: stop once `a_mu` has failed to strictly
/// improve on the best value for more than `patience` rounds.
#[derive(Clone, Debug, PartialEq)]
pub struct TerminationTracker {
    patience: u32,
    best: f64,
    stale: u32,
}

impl TerminationTracker {
    pub fn new(patience: u32) -> Self {
        Self {
            patience,
            best: 0.0,
            stale: 0,
        }
    }

    /// Feeds one mean score; the flag says whether it improved on the best.
    pub fn observe(&mut self, a_mu: f64) -> (Decision, bool) {
        let improved = a_mu > self.best;
        if improved {
            self.best = a_mu;
            self.stale = 0;
        } else {
            self.stale += 1;
        }
        (self.decision(), improved)
    }

    pub fn decision(&self) -> Decision {
        if self.stale > self.patience {
            Decision::Stop
        } else {
            Decision::Continue
        }
    }

    pub fn best(&self) -> f64 {
        self.best
    }

    pub fn stale_rounds(&self) -> u32 {
        self.stale
    }
}

/// The server's log of masked score sums, newest last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoreLog {
    capacity: usize,
    entries: VecDeque<ScoreEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScoreEntry {
    pub round: u64,
    pub clients: usize,
    pub masked_sum: i64,
}

impl ScoreLog {
    pub fn new(patience: u32) -> Self {
        let capacity = (patience as usize).max(1);
        Self {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        }
    }

    pub fn push(&mut self, entry: ScoreEntry) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(entry);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn latest(&self) -> Option<&ScoreEntry> {
        self.entries.back()
    }

    pub fn entries(&self) -> impl Iterator<Item = &ScoreEntry> {
        self.entries.iter()
    }
}

/// Replays the honest decision rule on the unmasked server log and names the
/// clients whose reports contradict it.
#[derive(Clone, Debug)]
pub struct Auditor {
    tracker: TerminationTracker,
}

impl Auditor {
    pub fn new(patience: u32) -> Self {
        Self {
            tracker: TerminationTracker::new(patience),
        }
    }

    pub fn observe(&mut self, a_mu: f64) -> Decision {
        self.tracker.observe(a_mu).0
    }

    pub fn tracker(&self) -> &TerminationTracker {
        &self.tracker
    }

    /// Empty when all reports agree; otherwise the clients that deviate from
    /// the honest decision.
    pub fn audit(&self, reports: &[(u32, Decision)]) -> Vec<u32> {
        let unanimous = reports.windows(2).all(|w| w[0].1 == w[1].1);
        if unanimous {
            return Vec::new();
        }
        let honest = self.tracker.decision();
        reports
            .iter()
            .filter(|(_, d)| *d != honest)
            .map(|(slot, _)| *slot)
            .collect()
    }
}
