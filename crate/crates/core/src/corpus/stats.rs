use std::collections::BTreeSet;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use super::{CategoryGraph, Corpus, Membership};
use crate::error::Result;
use crate::exec::Execution;

/// Node size and color inputs for one category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryStats {
    pub importance: f64,
    pub recency: Option<NaiveDate>,
}

/// Debate positions mentioning any entity in the category's closure.
pub(crate) fn debates_at(graph: &CategoryGraph, corpus: &Corpus, idx: usize) -> BTreeSet<usize> {
    graph
        .entities_at(idx, Membership::Transitive)
        .iter()
        .flat_map(|&e| corpus.entity_occurrences(graph.entity_at(e)))
        .map(|&(pos, _)| corpus.debate_index_of(pos))
        .collect()
}

pub(crate) fn importance_at(graph: &CategoryGraph, corpus: &Corpus, idx: usize) -> f64 {
    crate::fsum(
        graph
            .entities_at(idx, Membership::Transitive)
            .iter()
            .map(|&e| corpus.entity_total(graph.entity_at(e)) as f64),
    )
}

pub(crate) fn recency_at(graph: &CategoryGraph, corpus: &Corpus, idx: usize) -> Option<NaiveDate> {
    let dates: Vec<NaiveDate> = debates_at(graph, corpus, idx)
        .into_iter()
        .map(|d| corpus.debates()[d].date)
        .collect();
    median_date(dates)
}

/// Median of the dates; for an even count the midpoint of the two middle
/// dates, rounded down to a whole day.
pub fn median_date(mut dates: Vec<NaiveDate>) -> Option<NaiveDate> {
    if dates.is_empty() {
        return None;
    }
    dates.sort_unstable();
    let mid = dates.len() / 2;
    if dates.len() % 2 == 1 {
        return Some(dates[mid]);
    }
    let (lo, hi) = (dates[mid - 1], dates[mid]);
    let half = (hi - lo).num_days() / 2;
    lo.checked_add_days(Days::new(half as u64))
}

/// Total entity-mention count over the category's closure.
pub fn category_importance(graph: &CategoryGraph, corpus: &Corpus, category: &str) -> Result<f64> {
    Ok(importance_at(graph, corpus, graph.require(category)?))
}

/// Median date of the distinct debates that mention any closure entity.
pub fn category_recency(
    graph: &CategoryGraph,
    corpus: &Corpus,
    category: &str,
) -> Result<Option<NaiveDate>> {
    Ok(recency_at(graph, corpus, graph.require(category)?))
}

impl CategoryStats {
    pub fn of(graph: &CategoryGraph, corpus: &Corpus, category: &str) -> Result<Self> {
        let idx = graph.require(category)?;
        Ok(Self::at(graph, corpus, idx))
    }

    fn at(graph: &CategoryGraph, corpus: &Corpus, idx: usize) -> Self {
        CategoryStats {
            importance: importance_at(graph, corpus, idx),
            recency: recency_at(graph, corpus, idx),
        }
    }

    /// Stats for every category, in graph position order.
    pub fn compute_all(graph: &CategoryGraph, corpus: &Corpus, exec: Execution) -> Vec<Self> {
        exec.map_range(graph.len(), |idx| Self::at(graph, corpus, idx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::graph::tests::graph;
    use crate::corpus::{EntityMention, Speech};

    fn speech(id: &str, debate: &str, date: &str, entities: &[&str]) -> Speech {
        let text = entities.join(" ");
        let mut mentions = Vec::new();
        let mut offset = 0;
        for e in entities {
            let len = e.chars().count();
            mentions.push(EntityMention {
                entity_id: e.to_string(),
                begin: offset,
                end: offset + len,
                surface: e.to_string(),
            });
            offset += len + 1;
        }
        Speech {
            id: id.into(),
            debate_id: debate.into(),
            debate_title: debate.into(),
            date: date.parse().unwrap(),
            speaker: "s".into(),
            text,
            mentions,
        }
    }

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn importance_examples() {
        let g = graph(
            &["P", "C", "Z"],
            &[("P", "C"), ("P", "Z")],
            &[("C", "e1"), ("Z", "ghost"), ("P", "e2")],
        );
        let corpus = Corpus::from_speeches(vec![
            speech("a", "d1", "2000-01-01", &["e1", "e1"]),
            speech("b", "d2", "2004-01-01", &["e1", "e2"]),
        ])
        .unwrap();
        assert_eq!(category_importance(&g, &corpus, "Z").unwrap(), 0.0);
        assert_eq!(category_importance(&g, &corpus, "C").unwrap(), 3.0);
        assert!(category_importance(&g, &corpus, "P").unwrap() >= 3.0);
        assert_eq!(category_importance(&g, &corpus, "P").unwrap(), 4.0);
    }

    #[test]
    fn recency_examples() {
        let g = graph(&["A", "B", "N"], &[("A", "B")], &[("A", "x"), ("B", "y")]);
        let single = Corpus::from_speeches(vec![speech("a", "d1", "2001-01-01", &["x"])]).unwrap();
        assert_eq!(category_recency(&g, &single, "N").unwrap(), None);
        assert_eq!(category_recency(&g, &single, "A").unwrap(), Some(d("2001-01-01")));

        let three = Corpus::from_speeches(vec![
            speech("a", "d1", "2000-01-01", &["x"]),
            speech("b", "d2", "2004-01-01", &["y"]),
            speech("c", "d3", "2010-01-01", &["x", "y"]),
            // second speech of d3 does not add a debate
            speech("e", "d3", "2010-01-01", &["y"]),
        ])
        .unwrap();
        assert_eq!(category_recency(&g, &three, "A").unwrap(), Some(d("2004-01-01")));
    }

    #[test]
    fn even_median_is_midpoint() {
        assert_eq!(
            median_date(vec![d("2000-01-01"), d("2000-01-11")]),
            Some(d("2000-01-06"))
        );
        assert_eq!(median_date(vec![]), None);
    }

    #[test]
    fn compute_all_matches_single() {
        let g = graph(&["A", "B"], &[("A", "B"), ("B", "A")], &[("A", "x")]);
        let corpus = Corpus::from_speeches(vec![speech("a", "d1", "2001-01-01", &["x"])]).unwrap();
        let all = CategoryStats::compute_all(&g, &corpus, Execution::default());
        assert_eq!(all[1], CategoryStats::of(&g, &corpus, "B").unwrap());
        assert_eq!(all, CategoryStats::compute_all(&g, &corpus, Execution::Sequential));
    }
}
