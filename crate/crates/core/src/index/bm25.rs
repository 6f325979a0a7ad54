use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::exec::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    pub doc: u32,
    pub tf: u32,
}

/// Inverted postings plus the collection statistics BM25 needs. Documents
/// are dense positions `0..doc_count` with external string ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "StoredCollection", into = "StoredCollection")]
pub struct Bm25Collection {
    params: Bm25Params,
    doc_ids: Vec<String>,
    doc_by_id: HashMap<String, u32>,
    doc_lengths: Vec<u32>,
    avg_doc_length: f64,
    terms: Vec<String>,
    vocabulary: HashMap<String, u32>,
    // ascending by doc
    postings: Vec<Vec<Posting>>,
}

#[derive(Serialize, Deserialize)]
struct StoredCollection {
    params: Bm25Params,
    doc_ids: Vec<String>,
    doc_lengths: Vec<u32>,
    terms: Vec<String>,
    postings: Vec<Vec<Posting>>,
}

impl From<StoredCollection> for Bm25Collection {
    fn from(s: StoredCollection) -> Self {
        Bm25Collection::assemble(s.params, s.doc_ids, s.doc_lengths, s.terms, s.postings)
    }
}

impl From<Bm25Collection> for StoredCollection {
    fn from(c: Bm25Collection) -> Self {
        StoredCollection {
            params: c.params,
            doc_ids: c.doc_ids,
            doc_lengths: c.doc_lengths,
            terms: c.terms,
            postings: c.postings,
        }
    }
}

/// Query terms resolved against one collection: `(term, idf)` per query
/// token, in query order. Out-of-vocabulary tokens are dropped.
pub(crate) struct ResolvedQuery {
    terms: Vec<(u32, f64)>,
}

impl Bm25Collection {
    /// Build from per-document term counts keyed by term string.
    pub(crate) fn from_counts(
        params: Bm25Params,
        docs: Vec<(String, Vec<(String, u32)>)>,
    ) -> Self {
        let mut terms: Vec<String> = Vec::new();
        let mut vocabulary: HashMap<String, u32> = HashMap::new();
        let mut postings: Vec<Vec<Posting>> = Vec::new();
        let mut doc_ids = Vec::with_capacity(docs.len());
        let mut doc_lengths = Vec::with_capacity(docs.len());
        for (doc, (id, counts)) in docs.into_iter().enumerate() {
            let mut len = 0u32;
            for (term, tf) in counts {
                if tf == 0 {
                    continue;
                }
                len += tf;
                let t = match vocabulary.get(&term) {
                    Some(&t) => t,
                    None => {
                        let t = terms.len() as u32;
                        vocabulary.insert(term.clone(), t);
                        terms.push(term);
                        postings.push(Vec::new());
                        t
                    }
                };
                postings[t as usize].push(Posting {
                    doc: doc as u32,
                    tf,
                });
            }
            doc_ids.push(id);
            doc_lengths.push(len);
        }
        Self::assemble(params, doc_ids, doc_lengths, terms, postings)
    }

    fn assemble(
        params: Bm25Params,
        doc_ids: Vec<String>,
        doc_lengths: Vec<u32>,
        terms: Vec<String>,
        postings: Vec<Vec<Posting>>,
    ) -> Self {
        let avg_doc_length = if doc_lengths.is_empty() {
            0.0
        } else {
            doc_lengths.iter().map(|&l| f64::from(l)).sum::<f64>() / doc_lengths.len() as f64
        };
        Bm25Collection {
            params,
            doc_by_id: doc_ids
                .iter()
                .enumerate()
                .map(|(i, id)| (id.clone(), i as u32))
                .collect(),
            vocabulary: terms
                .iter()
                .enumerate()
                .map(|(i, t)| (t.clone(), i as u32))
                .collect(),
            doc_ids,
            doc_lengths,
            avg_doc_length,
            terms,
            postings,
        }
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.avg_doc_length
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn doc_position(&self, id: &str) -> Option<usize> {
        self.doc_by_id.get(id).map(|&d| d as usize)
    }

    pub fn doc_length(&self, id: &str) -> Option<u32> {
        self.doc_position(id).map(|d| self.doc_lengths[d])
    }

    pub fn doc_lengths(&self) -> &[u32] {
        &self.doc_lengths
    }

    pub fn vocabulary_size(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.vocabulary
            .get(term)
            .map(|&t| self.postings[t as usize].as_slice())
            .unwrap_or(&[])
    }

    pub fn postings_at(&self, term: usize) -> &[Posting] {
        &self.postings[term]
    }

    pub fn document_frequency(&self, term: &str) -> usize {
        self.postings(term).len()
    }

    pub fn term_frequency(&self, term: &str, doc: usize) -> u32 {
        tf_in(self.postings(term), doc as u32)
    }

    /// `ln((N - df + 0.5) / (df + 0.5) + 1)`, never negative.
    pub fn idf(&self, df: usize) -> f64 {
        let n = self.doc_count() as f64;
        let df = df as f64;
        ((n - df + 0.5) / (df + 0.5) + 1.0).ln()
    }

    fn term_weight(&self, idf: f64, tf: u32, len: u32) -> f64 {
        if tf == 0 {
            return 0.0;
        }
        let Bm25Params { k1, b } = self.params;
        let tf = f64::from(tf);
        let norm = if self.avg_doc_length > 0.0 {
            f64::from(len) / self.avg_doc_length
        } else {
            1.0
        };
        idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * norm))
    }

    pub(crate) fn resolve(&self, query: &[String]) -> ResolvedQuery {
        ResolvedQuery {
            terms: query
                .iter()
                .filter_map(|q| self.vocabulary.get(q))
                .map(|&t| (t, self.idf(self.postings[t as usize].len())))
                .collect(),
        }
    }

    pub(crate) fn score_resolved(&self, query: &ResolvedQuery, doc: usize) -> f64 {
        let len = self.doc_lengths[doc];
        query
            .terms
            .iter()
            .map(|&(t, idf)| {
                let tf = tf_in(&self.postings[t as usize], doc as u32);
                self.term_weight(idf, tf, len)
            })
            .fold(0.0, |acc, w| acc + w)
    }

    /// BM25 of the query tokens against the document at `doc`.
    pub fn score_at(&self, query: &[String], doc: usize) -> f64 {
        self.score_resolved(&self.resolve(query), doc)
    }

    /// Dense scores for every document, zero where no query term occurs.
    pub fn score_all_with(&self, query: &[String], exec: Execution) -> Vec<f64> {
        let resolved = self.resolve(query);
        let mut candidates: Vec<u32> = resolved
            .terms
            .iter()
            .flat_map(|&(t, _)| self.postings[t as usize].iter().map(|p| p.doc))
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        let scored = exec.map(&candidates, |&d| self.score_resolved(&resolved, d as usize));
        let mut scores = vec![0.0; self.doc_count()];
        for (d, s) in candidates.into_iter().zip(scored) {
            scores[d as usize] = s;
        }
        scores
    }

    /// Documents with positive score, best first, ties by id ascending.
    pub fn top_k(&self, scores: &[f64], k: usize) -> Vec<(String, f64)> {
        let mut hits: Vec<(usize, f64)> = scores
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, s)| s > 0.0)
            .collect();
        hits.sort_unstable_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then_with(|| self.doc_ids[a.0].cmp(&self.doc_ids[b.0]))
        });
        hits.truncate(k);
        hits.into_iter()
            .map(|(d, s)| (self.doc_ids[d].clone(), s))
            .collect()
    }
}

fn tf_in(postings: &[Posting], doc: u32) -> u32 {
    postings
        .binary_search_by_key(&doc, |p| p.doc)
        .map(|i| postings[i].tf)
        .unwrap_or(0)
}
