use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::histogram::{EdgeRankStats, JumpHistogram, LevelHistogram, JUMP_BINS, LEVEL_BINS, RANK_BINS};
use super::stats::{per_session_stats, SessionStats};
use crate::error::Result;
use crate::exec::Execution;
use crate::navigator::{Condition, SessionLog, System, Task};

pub const COLUMNS: [&str; 8] = [
    "root_selections",
    "root_depth",
    "node_expansions",
    "entity_list_loads",
    "speech_list_loads",
    "speech_content_views",
    "duration_min",
    "rating",
];

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

fn column_values(s: &SessionStats) -> [Option<f64>; 8] {
    [
        Some(f64::from(s.root_selections)),
        s.mean_root_depth,
        Some(f64::from(s.node_expansions)),
        Some(f64::from(s.entity_list_loads)),
        Some(f64::from(s.speech_list_loads)),
        Some(f64::from(s.speech_content_views)),
        Some(s.duration_minutes),
        s.external_rating,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mark {
    /// Significantly above every other row in the column.
    Higher,
    /// Significantly below every other row in the column.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub system: System,
    pub task: Task,
    pub sessions: usize,
    pub means: [Option<f64>; 8],
    pub marks: [Option<Mark>; 8],
}

/// Per-condition means of the session statistics, one row per condition
/// with at least one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Two-tailed p-value of Welch's unequal-variance t-test. `None` when
/// either sample has fewer than two values.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() < 2 || b.len() < 2 {
        return None;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a)?, mean(b)?);
    let var = |xs: &[f64], m: f64| xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0);
    let (qa, qb) = (var(a, ma) / na, var(b, mb) / nb);
    let se2 = qa + qb;
    if se2 == 0.0 {
        return Some(if ma == mb { 1.0 } else { 0.0 });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).ok()?;
    Some((2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0))
}

/// Group logs by condition and average each column. Sessions are ordered
/// by id inside a group, so the input order does not matter.
pub fn aggregate(logs: &[SessionLog]) -> Result<Report> {
    let stats = Execution::default().map(logs, per_session_stats);
    let mut groups: BTreeMap<(Task, System), Vec<(&str, SessionStats)>> = BTreeMap::new();
    for (log, s) in logs.iter().zip(stats) {
        let c = log.header.condition();
        groups.entry((c.task, c.system)).or_default().push((&log.header.session_id, s?));
    }
    let mut samples: Vec<(Condition, usize, [Vec<f64>; 8])> = Vec::new();
    for ((task, system), mut members) in groups {
        members.sort_by(|a, b| a.0.cmp(b.0));
        let mut cols: [Vec<f64>; 8] = Default::default();
        for (_, s) in &members {
            for (col, v) in cols.iter_mut().zip(column_values(s)) {
                col.extend(v);
            }
        }
        samples.push((Condition::new(system, task), members.len(), cols));
    }

    let rows = samples
        .iter()
        .enumerate()
        .map(|(r, (cond, n, cols))| {
            let means = std::array::from_fn(|c| mean(&cols[c]));
            let marks = std::array::from_fn(|c| {
                let mine = &cols[c];
                let m = mean(mine)?;
                let others: Vec<&Vec<f64>> = samples
                    .iter()
                    .enumerate()
                    .filter(|&(o, _)| o != r)
                    .map(|(_, s)| &s.2[c])
                    .collect();
                if others.is_empty() {
                    return None;
                }
                let mut above = true;
                let mut below = true;
                for other in others {
                    let p = welch_t_test(mine, other)?;
                    let om = mean(other)?;
                    let significant = p < SIGNIFICANCE_LEVEL;
                    above &= significant && m > om;
                    below &= significant && m < om;
                }
                if above {
                    Some(Mark::Higher)
                } else if below {
                    Some(Mark::Lower)
                } else {
                    None
                }
            });
            ReportRow {
                system: cond.system,
                task: cond.task,
                sessions: *n,
                means,
                marks,
            }
        })
        .collect();
    Ok(Report {
        columns: COLUMNS.iter().map(|c| c.to_string()).collect(),
        rows,
    })
}

fn system_name(s: System) -> &'static str {
    match s {
        System::Baseline => "baseline",
        System::Spn => "spn",
    }
}

fn task_name(t: Task) -> &'static str {
    match t {
        Task::Broad => "broad",
        Task::Focused => "focused",
    }
}

impl Report {
    /// Tab-separated table; means at two decimals, `^`/`v` after a value
    /// marks a significant difference from every other row.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("task\tsystem\tsessions");
        for c in &self.columns {
            let _ = write!(out, "\t{c}");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{}\t{}\t{}", task_name(row.task), system_name(row.system), row.sessions);
            for (m, mark) in row.means.iter().zip(&row.marks) {
                out.push('\t');
                match m {
                    Some(v) => {
                        let _ = write!(out, "{v:.2}");
                    }
                    None => out.push('-'),
                }
                match mark {
                    Some(Mark::Higher) => out.push('^'),
                    Some(Mark::Lower) => out.push('v'),
                    None => {}
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Table plus the pooled per-condition distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub report: Report,
    pub jumps: BTreeMap<String, JumpHistogram>,
    pub levels: BTreeMap<String, LevelHistogram>,
    pub edge_ranks: BTreeMap<String, EdgeRankStats>,
}

/// Histograms pool every event of every session in a condition.
pub fn analyze(logs: &[SessionLog]) -> Result<Analysis> {
    let report = aggregate(logs)?;
    let mut jumps: BTreeMap<String, JumpHistogram> = BTreeMap::new();
    let mut levels: BTreeMap<String, LevelHistogram> = BTreeMap::new();
    let mut edge_ranks: BTreeMap<String, EdgeRankStats> = BTreeMap::new();
    for log in logs {
        let key = log.header.condition().to_string();
        jumps.entry(key.clone()).or_default().add_log(log);
        levels.entry(key.clone()).or_default().add_log(log);
        let ranks = edge_ranks.entry(key).or_default();
        ranks.add_log(log);
    }
    edge_ranks.retain(|_, s| !s.is_empty());
    Ok(Analysis {
        report,
        jumps,
        levels,
        edge_ranks,
    })
}

fn series<const N: usize>(labels: &[&str; N], columns: Vec<(String, [f64; N])>) -> String {
    let mut out = String::from("bin");
    for (name, _) in &columns {
        let _ = write!(out, "\t{name}");
    }
    out.push('\n');
    for (i, label) in labels.iter().enumerate() {
        out.push_str(label);
        for (_, values) in &columns {
            let _ = write!(out, "\t{:.1}", values[i]);
        }
        out.push('\n');
    }
    out
}

impl Analysis {
    /// Level-jump percentages, one column per condition.
    pub fn jump_series(&self) -> String {
        series(
            &JUMP_BINS,
            self.jumps.iter().map(|(k, h)| (k.clone(), h.percentages())).collect(),
        )
    }

    pub fn level_series(&self) -> String {
        series(
            &LEVEL_BINS,
            self.levels.iter().map(|(k, h)| (k.clone(), h.percentages())).collect(),
        )
    }

    /// Selection percentage and mean displayed weight (as a percentage)
    /// per rank.
    pub fn edge_rank_series(&self) -> String {
        let mut cols = Vec::new();
        for (k, s) in &self.edge_ranks {
            cols.push((format!("{k}:selected"), s.selection_percentages()));
            let scores = s.mean_scores().unwrap_or([0.0; 6]).map(|w| 100.0 * w);
            cols.push((format!("{k}:score"), scores));
        }
        series(&RANK_BINS, cols)
    }
}
