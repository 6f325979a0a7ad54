use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::{CategoryGraph, Corpus, EntityMention, Membership};
use crate::error::{Error, Result};
use crate::Collection;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeechListItem {
    pub speech_id: String,
    pub mention_count: u32,
    pub debate_title: String,
    pub date: NaiveDate,
}

/// Speeches mentioning `entity`, by mention count descending, then date
/// descending, then id.
pub fn entity_speech_list(corpus: &Corpus, graph: &CategoryGraph, entity: &str) -> Result<Vec<SpeechListItem>> {
    if !corpus.mentions_entity(entity) && !graph.is_entity(entity) {
        return Err(Error::UnknownEntity(entity.to_string()));
    }
    let mut items: Vec<SpeechListItem> = corpus
        .entity_occurrences(entity)
        .iter()
        .map(|&(pos, count)| {
            let s = &corpus.speeches()[pos];
            SpeechListItem {
                speech_id: s.id.clone(),
                mention_count: count,
                debate_title: s.debate_title.clone(),
                date: s.date,
            }
        })
        .collect();
    items.sort_by(|a, b| {
        b.mention_count
            .cmp(&a.mention_count)
            .then(b.date.cmp(&a.date))
            .then_with(|| a.speech_id.cmp(&b.speech_id))
    });
    Ok(items)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewedSpeech {
    pub id: String,
    pub speaker: String,
    pub date: NaiveDate,
    pub text: String,
    pub mentions: Vec<EntityMention>,
}

/// A whole debate opened at one of its speeches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DebateView {
    pub debate_id: String,
    pub debate_title: String,
    pub date: NaiveDate,
    pub focus_id: String,
    /// 1-based position of the focused speech within `speeches`.
    pub focus_position: usize,
    pub speeches: Vec<ViewedSpeech>,
}

pub fn speech_view(corpus: &Corpus, speech: &str) -> Result<DebateView> {
    let pos = corpus
        .position(speech)
        .ok_or_else(|| Error::UnknownSpeech(speech.to_string()))?;
    let debate = corpus.debate_of(pos);
    let speeches: Vec<ViewedSpeech> = debate
        .speeches
        .iter()
        .map(|&p| {
            let s = &corpus.speeches()[p];
            ViewedSpeech {
                id: s.id.clone(),
                speaker: s.speaker.clone(),
                date: s.date,
                text: s.text.clone(),
                mentions: s.mentions.clone(),
            }
        })
        .collect();
    let focus_position = debate.speeches.iter().position(|&p| p == pos).expect("speech in its debate") + 1;
    Ok(DebateView {
        debate_id: debate.id.clone(),
        debate_title: debate.title.clone(),
        date: debate.date,
        focus_id: speech.to_string(),
        focus_position,
        speeches,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChildSummary {
    pub id: String,
    pub label: String,
    pub importance: f64,
    pub recency: Option<NaiveDate>,
}

/// Children of a category with their node statistics, in id order.
pub fn category_children(collection: &Collection, category: &str) -> Result<Vec<ChildSummary>> {
    collection
        .graph
        .children(category)?
        .into_iter()
        .map(|id| {
            let stats = collection.stats(id)?;
            Ok(ChildSummary {
                id: id.to_string(),
                label: collection.graph.category(id).map(|c| c.label.clone()).unwrap_or_default(),
                importance: stats.importance,
                recency: stats.recency,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntitySummary {
    pub id: String,
    pub mentions: u64,
}

/// Entities under the category's closure, most mentioned first, ties by id.
pub fn category_entities(collection: &Collection, category: &str) -> Result<Vec<EntitySummary>> {
    let graph = &collection.graph;
    let idx = graph.require(category)?;
    let mut out: Vec<EntitySummary> = graph
        .entities_at(idx, Membership::Transitive)
        .iter()
        .map(|&e| {
            let id = graph.entity_at(e);
            EntitySummary {
                id: id.to_string(),
                mentions: collection.corpus.entity_total(id),
            }
        })
        .collect();
    out.sort_by(|a, b| b.mentions.cmp(&a.mentions).then_with(|| a.id.cmp(&b.id)));
    Ok(out)
}
