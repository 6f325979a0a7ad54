use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::navigator::{EventKind, SessionLog};

/// One session's row of behavioral counts; fields follow the per-session
/// table columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionStats {
    pub root_selections: u32,
    /// Mean hierarchy depth over root selections with a known depth.
    pub mean_root_depth: Option<f64>,
    pub node_expansions: u32,
    pub entity_list_loads: u32,
    pub speech_list_loads: u32,
    pub speech_content_views: u32,
    pub duration_minutes: f64,
    pub external_rating: Option<f64>,
}

pub fn per_session_stats(log: &SessionLog) -> Result<SessionStats> {
    let mut stats = SessionStats {
        root_selections: 0,
        mean_root_depth: None,
        node_expansions: 0,
        entity_list_loads: 0,
        speech_list_loads: 0,
        speech_content_views: 0,
        duration_minutes: log.duration_minutes().max(0.0),
        external_rating: log.header.rating,
    };
    let (mut depth_sum, mut depth_n) = (0u64, 0u32);
    for (i, e) in log.events.iter().enumerate() {
        e.check_shape()
            .map_err(|m| Error::MalformedLog(format!("{} event {i}: {m}", log.header.session_id)))?;
        match e.kind {
            EventKind::RootSelection => {
                stats.root_selections += 1;
                if let Some(d) = e.root_depth {
                    depth_sum += u64::from(d);
                    depth_n += 1;
                }
            }
            EventKind::NodeExpansion => stats.node_expansions += 1,
            EventKind::EntityListLoad => stats.entity_list_loads += 1,
            EventKind::SpeechListLoad => stats.speech_list_loads += 1,
            EventKind::SpeechContentView => stats.speech_content_views += 1,
            EventKind::QuerySubmit | EventKind::EdgeSelection => {}
        }
    }
    if depth_n > 0 {
        stats.mean_root_depth = Some(depth_sum as f64 / f64::from(depth_n));
    }
    Ok(stats)
}
