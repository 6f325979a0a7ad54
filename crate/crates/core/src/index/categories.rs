use super::bm25::{Bm25Collection, Bm25Params};
use super::{tokenize, Index};
use crate::corpus::{debates_at, CategoryGraph, Corpus};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// BM25 collection with one virtual document per category: the
/// concatenated speeches of every debate under the category's closure.
/// Document positions coincide with graph positions.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryIndex {
    docs: Bm25Collection,
}

impl CategoryIndex {
    pub fn build(index: &Index, corpus: &Corpus, graph: &CategoryGraph) -> Self {
        Self::build_with(index, corpus, graph, Execution::default())
    }

    pub fn build_with(
        index: &Index,
        corpus: &Corpus,
        graph: &CategoryGraph,
        exec: Execution,
    ) -> Self {
        let forward = index.forward();
        let terms = index.collection().terms();
        let docs = exec.map_range(graph.len(), |c| {
            let mut counts: Vec<u32> = Vec::new();
            let mut touched: Vec<u32> = Vec::new();
            for d in debates_at(graph, corpus, c) {
                for &pos in &corpus.debates()[d].speeches {
                    for &(t, tf) in &forward[pos] {
                        let t = t as usize;
                        if t >= counts.len() {
                            counts.resize(t + 1, 0);
                        }
                        if counts[t] == 0 {
                            touched.push(t as u32);
                        }
                        counts[t] += tf;
                    }
                }
            }
            touched.sort_unstable();
            let doc: Vec<(String, u32)> = touched
                .into_iter()
                .map(|t| (terms[t as usize].clone(), counts[t as usize]))
                .collect();
            (graph.id_at(c).to_string(), doc)
        });
        CategoryIndex {
            docs: Bm25Collection::from_counts(index.params(), docs),
        }
    }

    pub(crate) fn from_collection(docs: Bm25Collection) -> Self {
        CategoryIndex { docs }
    }

    pub fn collection(&self) -> &Bm25Collection {
        &self.docs
    }

    pub fn params(&self) -> Bm25Params {
        self.docs.params()
    }

    pub fn score(&self, query: &[String], category: &str) -> Result<f64> {
        let doc = self
            .docs
            .doc_position(category)
            .ok_or_else(|| Error::UnknownCategory(category.to_string()))?;
        Ok(self.docs.score_at(query, doc))
    }

    pub fn score_all(&self, query: &[String]) -> Vec<f64> {
        self.docs.score_all_with(query, Execution::default())
    }
}

/// Top-k categories for root selection, by BM25 of the query against each
/// category's virtual document. Zero scores are omitted; ties by id.
pub fn search_categories(index: &CategoryIndex, query: &str, k: usize) -> Result<Vec<(String, f64)>> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    let terms = tokenize(query);
    if terms.is_empty() {
        return Err(Error::EmptyQuery);
    }
    Ok(index.docs.top_k(&index.score_all(&terms), k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::graph_fixture;

    #[test]
    fn examples() {
        let (corpus, graph) = graph_fixture();
        let idx = Index::build(&corpus);
        let cats = CategoryIndex::build(&idx, &corpus, &graph);
        assert!(search_categories(&cats, "zeppelin", 5).unwrap().is_empty());
        // "tax" appears in the debates under T but not under W
        let t = cats.score(&tokenize("tax"), "T").unwrap();
        let w = cats.score(&tokenize("tax"), "W").unwrap();
        assert!(t > 0.0 && w == 0.0);
        let hits = search_categories(&cats, "tax", 10).unwrap();
        let pos = |id: &str| hits.iter().position(|h| h.0 == id);
        assert!(pos("T").is_some() && pos("W").is_none());
        // T and its alias T2 are over the same debate set
        assert_eq!(
            cats.score(&tokenize("tax war"), "T").unwrap(),
            cats.score(&tokenize("tax war"), "T2").unwrap()
        );
        assert!(matches!(search_categories(&cats, "!!", 1), Err(Error::EmptyQuery)));
    }

    #[test]
    fn virtual_document_is_debate_concatenation() {
        let (corpus, graph) = graph_fixture();
        let idx = Index::build(&corpus);
        let cats = CategoryIndex::build(&idx, &corpus, &graph);
        let expected: u32 = ["t1", "t2"].iter().map(|s| idx.doc_length(s).unwrap()).sum();
        assert_eq!(cats.collection().doc_length("T"), Some(expected));
        assert_eq!(
            cats,
            CategoryIndex::build_with(&idx, &corpus, &graph, Execution::Sequential)
        );
    }
}
