use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::event::{Condition, EventInput, EventKind, NavEvent, System};
use crate::corpus::{CategoryGraph, Corpus};
use crate::error::{Error, Result};
use crate::index::tokenize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionHeader {
    pub session_id: String,
    pub system: System,
    pub task: crate::navigator::Task,
    #[serde(default)]
    pub task_id: String,
    /// External quality rating on a 10-point scale, attached after the fact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rating: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub started_at: Option<DateTime<Utc>>,
}

impl SessionHeader {
    pub fn new(session_id: impl Into<String>, condition: Condition, task_id: impl Into<String>) -> Self {
        SessionHeader {
            session_id: session_id.into(),
            system: condition.system,
            task: condition.task,
            task_id: task_id.into(),
            rating: None,
            started_at: None,
        }
    }

    pub fn condition(&self) -> Condition {
        Condition::new(self.system, self.task)
    }
}

/// Navigation state of one user session plus its append-only event log.
///
/// Levels are relative to the current root (root = 1). A node becomes
/// visible, with its level fixed, the first time one of its parents is
/// expanded under the current root.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Session {
    header: SessionHeader,
    events: Vec<NavEvent>,
    root: Option<String>,
    levels: BTreeMap<String, u32>,
    expanded: BTreeSet<String>,
    active_query: Option<String>,
}

fn illegal(msg: impl Into<String>) -> Error {
    Error::IllegalTransition(msg.into())
}

impl Session {
    pub fn new(header: SessionHeader) -> Self {
        Session {
            header,
            events: Vec::new(),
            root: None,
            levels: BTreeMap::new(),
            expanded: BTreeSet::new(),
            active_query: None,
        }
    }

    pub fn header(&self) -> &SessionHeader {
        &self.header
    }

    pub fn id(&self) -> &str {
        &self.header.session_id
    }

    pub fn condition(&self) -> Condition {
        self.header.condition()
    }

    pub fn events(&self) -> &[NavEvent] {
        &self.events
    }

    pub fn current_root(&self) -> Option<&str> {
        self.root.as_deref()
    }

    pub fn level(&self, category: &str) -> Option<u32> {
        self.levels.get(category).copied()
    }

    /// Visible categories under the current root and their levels.
    pub fn levels(&self) -> &BTreeMap<String, u32> {
        &self.levels
    }

    pub fn is_expanded(&self, category: &str) -> bool {
        self.expanded.contains(category)
    }

    pub fn expanded(&self) -> impl Iterator<Item = &str> {
        self.expanded.iter().map(String::as_str)
    }

    pub fn active_query(&self) -> Option<&str> {
        self.active_query.as_deref()
    }

    fn visible_level(&self, category: &str) -> Result<u32> {
        if self.root.is_none() {
            return Err(illegal(format!("no root selected before acting on {category}")));
        }
        self.level(category)
            .ok_or_else(|| illegal(format!("category {category} is not visible")))
    }

    /// Validate `input` against the current state, then append it with its
    /// computed level. State is untouched on error.
    pub fn apply(&mut self, graph: &CategoryGraph, corpus: &Corpus, input: EventInput) -> Result<&NavEvent> {
        if let Some(last) = self.events.last() {
            if input.timestamp < last.timestamp {
                return Err(illegal(format!(
                    "timestamp {} precedes previous event at {}",
                    input.timestamp, last.timestamp
                )));
            }
        }
        let lone = |what: &str| -> Result<()> {
            if input.edge_rank.is_some() || input.parent.is_some() || input.sibling_weights.is_some() {
                Err(illegal(format!("{what} event cannot carry edge fields")))
            } else {
                Ok(())
            }
        };
        let subject = input.subject.as_str();
        let mut event = NavEvent {
            timestamp: input.timestamp,
            kind: input.kind,
            subject: input.subject.clone(),
            level: None,
            edge_rank: None,
            parent: None,
            root_depth: None,
            sibling_weights: None,
        };

        match input.kind {
            EventKind::RootSelection => {
                lone("root_selection")?;
                let depth = graph.depth(subject)?;
                self.root = Some(subject.to_string());
                self.levels.clear();
                self.levels.insert(subject.to_string(), 1);
                self.expanded.clear();
                event.level = Some(1);
                event.root_depth = depth;
            }
            EventKind::NodeExpansion => {
                lone("node_expansion")?;
                graph.require(subject)?;
                let level = self.visible_level(subject)?;
                for child in graph.children(subject)? {
                    self.levels.entry(child.to_string()).or_insert(level + 1);
                }
                self.expanded.insert(subject.to_string());
                event.level = Some(level);
            }
            EventKind::EntityListLoad => {
                lone("entity_list_load")?;
                graph.require(subject)?;
                event.level = Some(self.visible_level(subject)?);
            }
            EventKind::SpeechListLoad => {
                lone("speech_list_load")?;
                if !corpus.mentions_entity(subject) && !graph.is_entity(subject) {
                    return Err(Error::UnknownEntity(subject.to_string()));
                }
            }
            EventKind::SpeechContentView => {
                lone("speech_content_view")?;
                if corpus.speech(subject).is_none() {
                    return Err(Error::UnknownSpeech(subject.to_string()));
                }
            }
            EventKind::QuerySubmit => {
                lone("query_submit")?;
                if tokenize(subject).is_empty() {
                    return Err(Error::EmptyQuery);
                }
                if self.header.system == System::Spn {
                    self.active_query = Some(subject.to_string());
                }
            }
            EventKind::EdgeSelection => {
                if self.header.system != System::Spn {
                    return Err(illegal("edge selection outside the spn condition"));
                }
                if self.active_query.is_none() {
                    return Err(illegal("edge selection before any query was submitted"));
                }
                let parent = input
                    .parent
                    .as_deref()
                    .ok_or_else(|| illegal("edge selection without parent"))?;
                let rank = input
                    .edge_rank
                    .filter(|&r| r >= 1)
                    .ok_or_else(|| illegal("edge selection needs a rank of at least 1"))?;
                graph.require(parent)?;
                graph.require(subject)?;
                if !self.is_expanded(parent) {
                    return Err(illegal(format!("parent {parent} is not expanded")));
                }
                let siblings = graph.children(parent)?;
                if !siblings.contains(&subject) {
                    return Err(illegal(format!("{subject} is not a child of {parent}")));
                }
                if rank as usize > siblings.len() {
                    return Err(illegal(format!("rank {rank} exceeds {} siblings", siblings.len())));
                }
                event.edge_rank = Some(rank);
                event.parent = Some(parent.to_string());
                event.sibling_weights = input.sibling_weights;
            }
        }
        self.events.push(event);
        Ok(self.events.last().expect("just pushed"))
    }

    /// Rebuild a session from a recorded log, checking that every stored
    /// level and depth matches what the navigator computes.
    pub fn replay(
        header: SessionHeader,
        events: &[NavEvent],
        graph: &CategoryGraph,
        corpus: &Corpus,
    ) -> Result<Session> {
        let mut session = Session::new(header);
        for (i, recorded) in events.iter().enumerate() {
            let produced = session.apply(graph, corpus, EventInput::from(recorded))?;
            if produced != recorded {
                return Err(Error::MalformedLog(format!(
                    "event {i} ({}) recorded as {recorded:?} but replays as {produced:?}",
                    recorded.kind
                )));
            }
        }
        Ok(session)
    }

    /// Last minus first event timestamp, in minutes.
    pub fn duration_minutes(&self) -> f64 {
        super::duration_minutes(&self.events)
    }
}

/// Apply one event to a session.
pub fn apply_event<'s>(
    session: &'s mut Session,
    graph: &CategoryGraph,
    corpus: &Corpus,
    event: EventInput,
) -> Result<&'s NavEvent> {
    session.apply(graph, corpus, event)
}
