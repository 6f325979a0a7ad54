//! Search-powered navigation: a query is scored against every speech, the
//! speech scores are pushed down to the entities they mention, entity mass
//! is summed over each category's closure, and the resulting category
//! scores weight the edges out of the categories a user has expanded.

use std::collections::{BTreeMap, BTreeSet};
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use lru::LruCache;
use serde::{Deserialize, Serialize};

use crate::corpus::{CategoryGraph, Corpus, Membership};
use crate::error::{Error, Result};
use crate::fsum;
use crate::index::{tokenize, Index};

/// L1-normalized entity scores: `raw(e) = Σ_d count(e, d) · score(d)`,
/// divided by the total raw mass. `speech_scores` is dense by corpus
/// position. Every entity mentioned in the corpus appears in the result;
/// an all-zero input yields all zeros.
pub fn entity_scores(speech_scores: &[f64], corpus: &Corpus) -> BTreeMap<String, f64> {
    let raw: BTreeMap<String, f64> = corpus
        .entities()
        .into_iter()
        .map(|e| {
            let mass = fsum(
                corpus
                    .entity_occurrences(e)
                    .iter()
                    .map(|&(pos, count)| f64::from(count) * speech_scores.get(pos).copied().unwrap_or(0.0)),
            );
            (e.to_string(), mass)
        })
        .collect();
    let total = fsum(raw.values().copied());
    if total > 0.0 {
        raw.into_iter().map(|(e, m)| (e, m / total)).collect()
    } else {
        raw
    }
}

/// Sum of normalized entity scores over the category's closure.
pub fn category_score(
    entity_scores: &BTreeMap<String, f64>,
    graph: &CategoryGraph,
    category: &str,
) -> Result<f64> {
    let idx = graph.require(category)?;
    Ok(fsum(
        graph
            .entities_at(idx, Membership::Transitive)
            .iter()
            .map(|&e| entity_scores.get(graph.entity_at(e)).copied().unwrap_or(0.0)),
    ))
}

/// Scores for one query, independent of any frontier.
#[derive(Debug, Clone)]
pub struct QueryScores {
    query: Vec<String>,
    speech: Vec<f64>,
    entity: BTreeMap<String, f64>,
    // normalized entity score by graph entity position
    graph_entity: Vec<f64>,
}

impl QueryScores {
    pub fn from_speech_scores(
        query: Vec<String>,
        speech: Vec<f64>,
        corpus: &Corpus,
        graph: &CategoryGraph,
    ) -> Self {
        let entity = entity_scores(&speech, corpus);
        let graph_entity = (0..graph.entity_count())
            .map(|e| entity.get(graph.entity_at(e)).copied().unwrap_or(0.0))
            .collect();
        QueryScores {
            query,
            speech,
            entity,
            graph_entity,
        }
    }

    /// Score every speech in the collection against `query`.
    pub fn compute(index: &Index, corpus: &Corpus, graph: &CategoryGraph, query: &str) -> Result<Self> {
        let terms = tokenize(query);
        if terms.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let speech = index.score_all(&terms);
        Ok(Self::from_speech_scores(terms, speech, corpus, graph))
    }

    pub fn query(&self) -> &[String] {
        &self.query
    }

    pub fn speech_scores(&self) -> &[f64] {
        &self.speech
    }

    pub fn entity_scores(&self) -> &BTreeMap<String, f64> {
        &self.entity
    }

    pub fn category_score_at(&self, graph: &CategoryGraph, idx: usize) -> f64 {
        fsum(graph.entities_at(idx, Membership::Transitive).iter().map(|&e| self.graph_entity[e]))
    }

    /// Edges out of one parent in rank order.
    pub fn sibling_edges(&self, graph: &CategoryGraph, parent: &str) -> Result<Vec<EdgeWeight>> {
        Ok(self.sibling_edges_at(graph, graph.require(parent)?))
    }

    fn sibling_edges_at(&self, graph: &CategoryGraph, p: usize) -> Vec<EdgeWeight> {
        let mut group: Vec<(usize, f64)> = graph
            .children_at(p)
            .iter()
            .map(|&c| (c, self.category_score_at(graph, c)))
            .collect();
        let mass = fsum(group.iter().map(|g| g.1));
        group.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| graph.id_at(a.0).cmp(graph.id_at(b.0))));
        group
            .into_iter()
            .enumerate()
            .map(|(rank, (c, s))| EdgeWeight {
                parent: graph.id_at(p).to_string(),
                child: graph.id_at(c).to_string(),
                score: s,
                weight: if mass > 0.0 { s / mass } else { 0.0 },
                rank: rank as u32 + 1,
            })
            .collect()
    }

    /// Edge weights out of every frontier category.
    pub fn edge_weights(
        &self,
        corpus: &Corpus,
        graph: &CategoryGraph,
        frontier: &[String],
    ) -> Result<EdgeWeightMap> {
        let parents: BTreeSet<usize> = frontier
            .iter()
            .map(|f| graph.require(f))
            .collect::<Result<_>>()?;

        let mut category_scores = BTreeMap::new();
        let mut edges = Vec::new();
        for &p in &parents {
            category_scores.insert(graph.id_at(p).to_string(), self.category_score_at(graph, p));
            for e in self.sibling_edges_at(graph, p) {
                category_scores.insert(e.child.clone(), e.score);
                edges.push(e);
            }
        }

        Ok(EdgeWeightMap {
            query: self.query.clone(),
            speech_scores: corpus
                .speeches()
                .iter()
                .zip(&self.speech)
                .filter(|(_, &s)| s > 0.0)
                .map(|(sp, &s)| (sp.id.clone(), s))
                .collect(),
            entity_scores: self
                .entity
                .iter()
                .filter(|(_, &s)| s > 0.0)
                .map(|(e, &s)| (e.clone(), s))
                .collect(),
            category_scores,
            edges,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeWeight {
    pub parent: String,
    pub child: String,
    /// Raw category score of the child.
    pub score: f64,
    /// Child score over the summed scores of its siblings; 0 for every
    /// sibling when that sum is 0.
    pub weight: f64,
    /// 1-based position among siblings by descending score, ties by id.
    pub rank: u32,
}

/// Per-query navigation guidance. Scores absent from the maps are 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeWeightMap {
    pub query: Vec<String>,
    pub speech_scores: BTreeMap<String, f64>,
    pub entity_scores: BTreeMap<String, f64>,
    /// Frontier categories and their children.
    pub category_scores: BTreeMap<String, f64>,
    /// Grouped by parent (id order), each group in rank order.
    pub edges: Vec<EdgeWeight>,
}

impl EdgeWeightMap {
    pub fn edge(&self, parent: &str, child: &str) -> Option<&EdgeWeight> {
        self.edges.iter().find(|e| e.parent == parent && e.child == child)
    }

    pub fn siblings<'a>(&'a self, parent: &'a str) -> impl Iterator<Item = &'a EdgeWeight> + 'a {
        self.edges.iter().filter(move |e| e.parent == parent)
    }

    /// Sibling weights under `parent`, in rank order.
    pub fn sibling_weights(&self, parent: &str) -> Vec<f64> {
        self.siblings(parent).map(|e| e.weight).collect()
    }
}

/// Full pipeline: BM25 over all speeches, then entity, category and edge
/// scores for the children of every frontier category. A query whose terms
/// are all out of vocabulary yields all-zero weights.
pub fn edge_weights(
    index: &Index,
    corpus: &Corpus,
    graph: &CategoryGraph,
    query: &str,
    frontier: &[String],
) -> Result<EdgeWeightMap> {
    QueryScores::compute(index, corpus, graph, query)?.edge_weights(corpus, graph, frontier)
}

/// Bounded LRU of [`QueryScores`] keyed by the tokenized query, so repeated
/// frontier requests for one query skip rescoring the collection.
pub struct ScoreCache {
    entries: Mutex<LruCache<Vec<String>, Arc<QueryScores>>>,
}

impl ScoreCache {
    pub fn new(capacity: usize) -> Self {
        let capacity = NonZeroUsize::new(capacity).unwrap_or(NonZeroUsize::MIN);
        ScoreCache {
            entries: Mutex::new(LruCache::new(capacity)),
        }
    }

    pub fn get_or_compute(
        &self,
        index: &Index,
        corpus: &Corpus,
        graph: &CategoryGraph,
        query: &str,
    ) -> Result<Arc<QueryScores>> {
        let terms = tokenize(query);
        if terms.is_empty() {
            return Err(Error::EmptyQuery);
        }
        if let Some(hit) = self.lock().get(&terms) {
            return Ok(Arc::clone(hit));
        }
        // scored outside the lock; a concurrent miss on the same key just
        // computes the same value twice
        let speech = index.score_all(&terms);
        let scores = Arc::new(QueryScores::from_speech_scores(terms.clone(), speech, corpus, graph));
        self.lock().put(terms, Arc::clone(&scores));
        Ok(scores)
    }

    pub fn len(&self) -> usize {
        self.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, LruCache<Vec<String>, Arc<QueryScores>>> {
        self.entries.lock().unwrap_or_else(|e| e.into_inner())
    }
}
