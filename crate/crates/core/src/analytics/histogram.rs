use serde::{Deserialize, Serialize};

use crate::navigator::{EventKind, SessionLog};

/// Labels of the level-jump axis.
pub const JUMP_BINS: [&str; 7] = ["<-2", "-2", "-1", "0", "+1", "+2", ">+2"];
/// Labels of the level-visit axis.
pub const LEVEL_BINS: [&str; 6] = ["1", "2", "3", "4", "5", "6+"];
/// Labels of the edge-rank axis.
pub const RANK_BINS: [&str; 6] = ["1", "2", "3", "4", "5", "6+"];

fn percentages<const N: usize>(counts: &[u64; N]) -> [f64; N] {
    let total: u64 = counts.iter().sum();
    let mut out = [0.0; N];
    if total > 0 {
        for (o, &c) in out.iter_mut().zip(counts) {
            *o = 100.0 * c as f64 / total as f64;
        }
    }
    out
}

/// Levels of consecutive level visits, split into runs at each root
/// selection.
fn visit_runs(log: &SessionLog) -> Vec<Vec<u32>> {
    let mut runs = vec![Vec::new()];
    for e in &log.events {
        if e.kind == EventKind::RootSelection {
            runs.push(Vec::new());
        } else if e.kind.is_level_visit() {
            if let Some(level) = e.level {
                runs.last_mut().expect("non-empty").push(level);
            }
        }
    }
    runs.retain(|r| !r.is_empty());
    runs
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpHistogram {
    pub counts: [u64; 7],
}

impl JumpHistogram {
    pub fn bin_of(jump: i64) -> usize {
        match jump {
            j if j < -2 => 0,
            -2 => 1,
            -1 => 2,
            0 => 3,
            1 => 4,
            2 => 5,
            _ => 6,
        }
    }

    pub fn add_jump(&mut self, jump: i64) {
        self.counts[Self::bin_of(jump)] += 1;
    }

    pub fn add_log(&mut self, log: &SessionLog) {
        for run in visit_runs(log) {
            for pair in run.windows(2) {
                self.add_jump(i64::from(pair[1]) - i64::from(pair[0]));
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    pub fn percentages(&self) -> [f64; 7] {
        percentages(&self.counts)
    }

    pub fn percentage(&self, label: &str) -> f64 {
        JUMP_BINS
            .iter()
            .position(|&b| b == label)
            .map(|i| self.percentages()[i])
            .unwrap_or(0.0)
    }

    /// Label of the most populated bin; the lowest bin wins ties.
    pub fn mode(&self) -> Option<&'static str> {
        if self.is_empty() {
            return None;
        }
        let max = *self.counts.iter().max().expect("seven bins");
        self.counts.iter().position(|&c| c == max).map(|i| JUMP_BINS[i])
    }
}

/// Jumps between consecutive level visits. A root selection starts a new
/// sequence; fewer than two visits give an empty histogram.
pub fn level_jump_histogram(log: &SessionLog) -> JumpHistogram {
    let mut h = JumpHistogram::default();
    h.add_log(log);
    h
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelHistogram {
    pub counts: [u64; 6],
}

impl LevelHistogram {
    pub fn bin_of(level: u32) -> usize {
        (level.clamp(1, 6) - 1) as usize
    }

    pub fn add_log(&mut self, log: &SessionLog) {
        for e in log.events.iter().filter(|e| e.kind.is_level_visit()) {
            if let Some(level) = e.level {
                self.counts[Self::bin_of(level)] += 1;
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    pub fn percentages(&self) -> [f64; 6] {
        percentages(&self.counts)
    }

    pub fn percentage(&self, label: &str) -> f64 {
        LEVEL_BINS
            .iter()
            .position(|&b| b == label)
            .map(|i| self.percentages()[i])
            .unwrap_or(0.0)
    }
}

/// Share of level visits per level, levels of 6 and above pooled.
pub fn level_visit_histogram(log: &SessionLog) -> LevelHistogram {
    let mut h = LevelHistogram::default();
    h.add_log(log);
    h
}

/// Edge selections by sibling rank, alongside the mean displayed weight at
/// each rank over the selection contexts.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EdgeRankStats {
    pub selections: [u64; 6],
    /// Summed sibling weight per rank bin over contexts with recorded
    /// weights.
    weight_sums: [f64; 6],
    pub contexts: u64,
}

impl EdgeRankStats {
    pub fn add_log(&mut self, log: &SessionLog) {
        for e in log.events.iter().filter(|e| e.kind == EventKind::EdgeSelection) {
            let Some(rank) = e.edge_rank else { continue };
            self.selections[(rank.clamp(1, 6) - 1) as usize] += 1;
            if let Some(weights) = &e.sibling_weights {
                for (i, w) in weights.iter().enumerate() {
                    self.weight_sums[i.min(5)] += w;
                }
                self.contexts += 1;
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.selections.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    pub fn selection_percentages(&self) -> [f64; 6] {
        percentages(&self.selections)
    }

    /// Mean sibling-normalized weight at each rank; `None` without any
    /// recorded context.
    pub fn mean_scores(&self) -> Option<[f64; 6]> {
        if self.contexts == 0 {
            return None;
        }
        Some(self.weight_sums.map(|s| s / self.contexts as f64))
    }

    /// `(selection %, mean score)` per rank bin that has selections.
    pub fn by_rank(&self) -> Vec<(&'static str, f64, Option<f64>)> {
        let pct = self.selection_percentages();
        let scores = self.mean_scores();
        (0..6)
            .filter(|&i| self.selections[i] > 0)
            .map(|i| (RANK_BINS[i], pct[i], scores.map(|s| s[i])))
            .collect()
    }
}

/// Pooled edge-rank statistics over logs. Logs without edge selections
/// (the baseline condition) contribute nothing.
pub fn edge_rank_stats<'a>(logs: impl IntoIterator<Item = &'a SessionLog>) -> EdgeRankStats {
    let mut stats = EdgeRankStats::default();
    for log in logs {
        stats.add_log(log);
    }
    stats
}
