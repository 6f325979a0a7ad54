use std::path::Path;

use crate::corpus::{load_corpus, load_hierarchy, CategoryGraph, CategoryStats, Corpus};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::index::{load_index, CategoryIndex, Index};

/// Everything the browser serves, loaded once and shared read-only.
#[derive(Debug, Clone)]
pub struct Collection {
    pub corpus: Corpus,
    pub graph: CategoryGraph,
    pub index: Index,
    pub categories: CategoryIndex,
    stats: Vec<CategoryStats>,
}

impl Collection {
    /// Build both indexes and all category statistics.
    pub fn new(corpus: Corpus, graph: CategoryGraph) -> Self {
        let index = Index::build(&corpus);
        let categories = CategoryIndex::build(&index, &corpus, &graph);
        Self::with_indexes(corpus, graph, index, categories)
    }

    pub fn with_indexes(
        corpus: Corpus,
        graph: CategoryGraph,
        index: Index,
        categories: CategoryIndex,
    ) -> Self {
        let stats = CategoryStats::compute_all(&graph, &corpus, Execution::default());
        Collection {
            corpus,
            graph,
            index,
            categories,
            stats,
        }
    }

    /// Load the corpus file and hierarchy directory; use a persisted index
    /// when given, otherwise build one.
    pub fn load(
        corpus: impl AsRef<Path>,
        hierarchy: impl AsRef<Path>,
        index: Option<&Path>,
    ) -> Result<Self> {
        let corpus = load_corpus(corpus)?;
        let graph = load_hierarchy(hierarchy)?;
        match index {
            Some(path) => {
                let (index, categories) = load_index(path)?.into_indexes(&corpus, &graph)?;
                Ok(Self::with_indexes(corpus, graph, index, categories))
            }
            None => Ok(Self::new(corpus, graph)),
        }
    }

    pub fn stats(&self, category: &str) -> Result<&CategoryStats> {
        self.graph
            .index_of(category)
            .map(|i| &self.stats[i])
            .ok_or_else(|| Error::UnknownCategory(category.to_string()))
    }

    pub fn all_stats(&self) -> &[CategoryStats] {
        &self.stats
    }

    /// The bundled demo dataset under `fixtures/`.
    pub fn fixture() -> Result<Self> {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        Self::load(dir.join("speeches.jsonl"), dir.join("hierarchy"), None)
    }
}
