use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    RootSelection,
    NodeExpansion,
    EntityListLoad,
    SpeechListLoad,
    SpeechContentView,
    QuerySubmit,
    EdgeSelection,
}

impl EventKind {
    pub const ALL: [EventKind; 7] = [
        EventKind::RootSelection,
        EventKind::NodeExpansion,
        EventKind::EntityListLoad,
        EventKind::SpeechListLoad,
        EventKind::SpeechContentView,
        EventKind::QuerySubmit,
        EventKind::EdgeSelection,
    ];

    /// Events that carry a hierarchy level.
    pub fn has_level(self) -> bool {
        matches!(
            self,
            EventKind::RootSelection | EventKind::NodeExpansion | EventKind::EntityListLoad
        )
    }

    /// Level visits: expanding a node or loading its entity list.
    pub fn is_level_visit(self) -> bool {
        matches!(self, EventKind::NodeExpansion | EventKind::EntityListLoad)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::RootSelection => "root_selection",
            EventKind::NodeExpansion => "node_expansion",
            EventKind::EntityListLoad => "entity_list_load",
            EventKind::SpeechListLoad => "speech_list_load",
            EventKind::SpeechContentView => "speech_content_view",
            EventKind::QuerySubmit => "query_submit",
            EventKind::EdgeSelection => "edge_selection",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    Baseline,
    Spn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Broad,
    Focused,
}

/// One experimental condition: which system, which task type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Condition {
    pub system: System,
    pub task: Task,
}

impl Condition {
    pub const ALL: [Condition; 4] = [
        Condition { system: System::Baseline, task: Task::Broad },
        Condition { system: System::Spn, task: Task::Broad },
        Condition { system: System::Baseline, task: Task::Focused },
        Condition { system: System::Spn, task: Task::Focused },
    ];

    pub fn new(system: System, task: Task) -> Self {
        Condition { system, task }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let system = match self.system {
            System::Baseline => "baseline",
            System::Spn => "spn",
        };
        let task = match self.task {
            Task::Broad => "broad",
            Task::Focused => "focused",
        };
        write!(f, "{system}/{task}")
    }
}

/// A recorded interaction. `level` is set exactly for root selections,
/// expansions and entity-list loads; `edge_rank` and `parent` exactly for
/// edge selections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavEvent {
    pub timestamp: DateTime<Utc>,
    pub kind: EventKind,
    pub subject: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_rank: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    /// Hierarchy depth of a selected root; absent when unreachable from the
    /// designated root.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_depth: Option<u32>,
    /// Sibling weights in rank order as displayed when an edge was selected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sibling_weights: Option<Vec<f64>>,
}

/// What a client submits; the navigator fills in level and depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventInput {
    pub timestamp: DateTime<Utc>,
    pub kind: EventKind,
    pub subject: String,
    #[serde(default)]
    pub edge_rank: Option<u32>,
    #[serde(default)]
    pub parent: Option<String>,
    #[serde(default)]
    pub sibling_weights: Option<Vec<f64>>,
}

impl EventInput {
    pub fn new(timestamp: DateTime<Utc>, kind: EventKind, subject: impl Into<String>) -> Self {
        EventInput {
            timestamp,
            kind,
            subject: subject.into(),
            edge_rank: None,
            parent: None,
            sibling_weights: None,
        }
    }

    pub fn edge(
        timestamp: DateTime<Utc>,
        parent: impl Into<String>,
        child: impl Into<String>,
        rank: u32,
    ) -> Self {
        EventInput {
            edge_rank: Some(rank),
            parent: Some(parent.into()),
            ..Self::new(timestamp, EventKind::EdgeSelection, child)
        }
    }

    pub fn with_sibling_weights(mut self, weights: Vec<f64>) -> Self {
        self.sibling_weights = Some(weights);
        self
    }
}

impl From<&NavEvent> for EventInput {
    fn from(e: &NavEvent) -> Self {
        EventInput {
            timestamp: e.timestamp,
            kind: e.kind,
            subject: e.subject.clone(),
            edge_rank: e.edge_rank,
            parent: e.parent.clone(),
            sibling_weights: e.sibling_weights.clone(),
        }
    }
}

impl NavEvent {
    /// Field-presence rules for a stored event.
    pub fn check_shape(&self) -> Result<(), String> {
        if self.kind.has_level() != self.level.is_some() {
            return Err(format!("{} event with level {:?}", self.kind, self.level));
        }
        let is_edge = self.kind == EventKind::EdgeSelection;
        if is_edge != self.edge_rank.is_some() || is_edge != self.parent.is_some() {
            return Err(format!("{} event with edge_rank {:?}", self.kind, self.edge_rank));
        }
        if matches!(self.level, Some(0)) || matches!(self.edge_rank, Some(0)) {
            return Err(format!("{} event with zero level or rank", self.kind));
        }
        Ok(())
    }
}
