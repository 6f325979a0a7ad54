//! Behavioral metrics over session logs: per-session counts, level-jump and
//! level-visit distributions, edge-rank selection, and the grouped report.

mod histogram;
mod report;
mod stats;

pub use histogram::{
    edge_rank_stats, level_jump_histogram, level_visit_histogram, EdgeRankStats, JumpHistogram, LevelHistogram,
    JUMP_BINS, LEVEL_BINS, RANK_BINS,
};
pub use report::{aggregate, analyze, welch_t_test, Analysis, Mark, Report, ReportRow, COLUMNS, SIGNIFICANCE_LEVEL};
pub use stats::{per_session_stats, SessionStats};
