use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bm25::Bm25Collection;
use super::{CategoryIndex, Index};
use crate::corpus::{CategoryGraph, Corpus};
use crate::error::{Error, Result};

pub const INDEX_FORMAT: &str = "catnav-index";
pub const INDEX_VERSION: u32 = 1;

/// On-disk JSON form of both indexes. The `format` and `version` tags are
/// checked on load.
#[derive(Debug, Serialize, Deserialize)]
pub struct IndexFile {
    pub format: String,
    pub version: u32,
    speeches: Bm25Collection,
    categories: Bm25Collection,
}

impl IndexFile {
    pub fn new(index: &Index, categories: &CategoryIndex) -> Self {
        IndexFile {
            format: INDEX_FORMAT.to_string(),
            version: INDEX_VERSION,
            speeches: index.collection().clone(),
            categories: categories.collection().clone(),
        }
    }

    /// Split into indexes after checking they describe this corpus and
    /// graph.
    pub fn into_indexes(self, corpus: &Corpus, graph: &CategoryGraph) -> Result<(Index, CategoryIndex)> {
        let speech_ids = corpus.speeches().iter().map(|s| s.id.as_str());
        if !self.speeches.doc_ids().iter().map(String::as_str).eq(speech_ids) {
            return Err(Error::IndexFormat("speech ids do not match the corpus".into()));
        }
        let cat_ids = graph.categories().iter().map(|c| c.id.as_str());
        if !self.categories.doc_ids().iter().map(String::as_str).eq(cat_ids) {
            return Err(Error::IndexFormat("category ids do not match the hierarchy".into()));
        }
        Ok((
            Index::from_collection(self.speeches),
            CategoryIndex::from_collection(self.categories),
        ))
    }
}

pub fn save_index(path: impl AsRef<Path>, index: &Index, categories: &CategoryIndex) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut out, &IndexFile::new(index, categories))?;
    out.flush()?;
    Ok(())
}

pub fn load_index(path: impl AsRef<Path>) -> Result<IndexFile> {
    let file: IndexFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    if file.format != INDEX_FORMAT {
        return Err(Error::IndexFormat(format!("unexpected format tag {:?}", file.format)));
    }
    if file.version != INDEX_VERSION {
        return Err(Error::IndexFormat(format!("unsupported version {}", file.version)));
    }
    Ok(file)
}
