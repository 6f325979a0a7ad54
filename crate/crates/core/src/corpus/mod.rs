//! Speeches, the category hierarchy and per-category statistics.

mod graph;
mod speech;
mod stats;

pub use graph::{entities_under, load_hierarchy, Category, CategoryGraph, Membership};
pub use speech::{load_corpus, Corpus, Debate, EntityMention, Speech};
pub use stats::{category_importance, category_recency, median_date, CategoryStats};

pub(crate) use stats::debates_at;

/// Three speeches in two debates over a four-category graph:
/// R → {T, T2, W}; T and T2 both hold entity Tax, W holds War.
#[cfg(test)]
pub(crate) fn graph_fixture() -> (Corpus, CategoryGraph) {
    let speech = |id: &str, debate: &str, text: &str, mention: Option<(&str, usize)>| Speech {
        id: id.into(),
        debate_id: debate.into(),
        debate_title: format!("debate {debate}"),
        date: "2001-01-01".parse().unwrap(),
        speaker: "s".into(),
        text: text.into(),
        mentions: mention
            .map(|(e, len)| EntityMention {
                entity_id: e.into(),
                begin: 0,
                end: len,
                surface: text[..len].into(),
            })
            .into_iter()
            .collect(),
    };
    let corpus = Corpus::from_speeches(vec![
        speech("t1", "dt", "tax reform", Some(("Tax", 3))),
        speech("t2", "dt", "more tax", None),
        speech("w1", "dw", "war memories", Some(("War", 3))),
    ])
    .unwrap();
    let cat = |id: &str| Category { id: id.into(), label: id.into() };
    let s = |a: &str, b: &str| (a.to_string(), b.to_string());
    let graph = CategoryGraph::new(
        vec![cat("R"), cat("T"), cat("T2"), cat("W")],
        [s("R", "T"), s("R", "T2"), s("R", "W")],
        [s("T", "Tax"), s("T2", "Tax"), s("W", "War")],
        "R",
    )
    .unwrap();
    (corpus, graph)
}
