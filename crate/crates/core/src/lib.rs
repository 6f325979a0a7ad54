//! Exploratory search over an entity-annotated speech corpus projected onto
//! a category hierarchy.
//!
//! * [`corpus`]: speeches, the category graph, importance and recency
//! * [`index`]: tokenization, BM25 over speeches and over category documents
//! * [`spn`]: search-powered navigation, i.e. query-driven edge weights
//! * [`navigator`]: session state machine, browse payloads, session logs
//! * [`analytics`]: per-session statistics, level histograms, edge ranks
//! * [`simulator`]: seeded synthetic sessions under navigation policies
//! * [`synth`]: seeded random corpora and hierarchies for tests and benches

pub mod analytics;
pub mod corpus;
mod error;
pub mod exec;
pub mod index;
pub mod navigator;
pub mod simulator;
pub mod spn;
pub mod synth;

mod collection;

pub use collection::Collection;
pub use error::{Error, Result};
pub use exec::Execution;

/// Float sum that starts from +0.0. `Iterator::sum` yields -0.0 for an
/// empty sequence, which sorts below 0.0 under `total_cmp` and would leak
/// into JSON output.
pub(crate) fn fsum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, v| acc + v)
}
