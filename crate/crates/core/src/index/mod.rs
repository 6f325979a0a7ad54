//! Tokenization, the speech-level inverted index with BM25 scoring, and the
//! category-level index used for root search.

mod bm25;
mod categories;
mod persist;
mod tokenize;

use std::collections::HashMap;

pub use bm25::{Bm25Collection, Bm25Params, Posting};
pub use categories::{search_categories, CategoryIndex};
pub use persist::{load_index, save_index, IndexFile, INDEX_FORMAT, INDEX_VERSION};
pub use tokenize::tokenize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Immutable speech index. Document positions coincide with corpus
/// positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Index {
    docs: Bm25Collection,
}

/// Term counts in first-occurrence order.
pub(crate) fn count_terms(tokens: Vec<String>) -> Vec<(String, u32)> {
    let mut slot: HashMap<String, usize> = HashMap::new();
    let mut counts: Vec<(String, u32)> = Vec::new();
    for t in tokens {
        match slot.get(&t) {
            Some(&i) => counts[i].1 += 1,
            None => {
                slot.insert(t.clone(), counts.len());
                counts.push((t, 1));
            }
        }
    }
    counts
}

impl Index {
    pub fn build(corpus: &Corpus) -> Self {
        Self::build_with(corpus, Bm25Params::default(), Execution::default())
    }

    pub fn build_with(corpus: &Corpus, params: Bm25Params, exec: Execution) -> Self {
        let docs = exec.map(corpus.speeches(), |s| (s.id.clone(), count_terms(tokenize(&s.text))));
        Index {
            docs: Bm25Collection::from_counts(params, docs),
        }
    }

    pub(crate) fn from_collection(docs: Bm25Collection) -> Self {
        Index { docs }
    }

    pub fn collection(&self) -> &Bm25Collection {
        &self.docs
    }

    pub fn doc_count(&self) -> usize {
        self.docs.doc_count()
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.docs.avg_doc_length()
    }

    pub fn params(&self) -> Bm25Params {
        self.docs.params()
    }

    /// `(speech id, tf)` postings for a term.
    pub fn postings(&self, term: &str) -> Vec<(&str, u32)> {
        self.docs
            .postings(term)
            .iter()
            .map(|p| (self.docs.doc_ids()[p.doc as usize].as_str(), p.tf))
            .collect()
    }

    pub fn doc_length(&self, speech: &str) -> Option<u32> {
        self.docs.doc_length(speech)
    }

    pub fn document_frequency(&self, term: &str) -> usize {
        self.docs.document_frequency(term)
    }

    /// Dense BM25 scores over all speeches, by corpus position.
    pub fn score_all(&self, query: &[String]) -> Vec<f64> {
        self.docs.score_all_with(query, Execution::default())
    }

    pub fn score_all_with(&self, query: &[String], exec: Execution) -> Vec<f64> {
        self.docs.score_all_with(query, exec)
    }

    /// Term-by-term postings per speech, sorted by term position in
    /// [`Bm25Collection::terms`].
    pub(crate) fn forward(&self) -> Vec<Vec<(u32, u32)>> {
        let mut forward = vec![Vec::new(); self.doc_count()];
        for t in 0..self.docs.vocabulary_size() {
            for p in self.docs.postings_at(t) {
                forward[p.doc as usize].push((t as u32, p.tf));
            }
        }
        forward
    }
}

pub fn build_index(corpus: &Corpus) -> Index {
    Index::build(corpus)
}

/// BM25 of `query` against one speech.
pub fn bm25_score(index: &Index, query: &[String], speech: &str) -> Result<f64> {
    let doc = index
        .docs
        .doc_position(speech)
        .ok_or_else(|| Error::UnknownSpeech(speech.to_string()))?;
    Ok(index.docs.score_at(query, doc))
}

/// Top-k speeches by BM25, descending, ties by id ascending. Speeches with
/// zero score are omitted.
pub fn search_speeches(index: &Index, query: &str, k: usize) -> Result<Vec<(String, f64)>> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    let terms = tokenize(query);
    if terms.is_empty() {
        return Err(Error::EmptyQuery);
    }
    Ok(index.docs.top_k(&index.score_all(&terms), k))
}
