//! Session state machine, browse payloads and session log persistence.

mod browse;
mod event;
mod log;
mod session;
mod store;

pub use browse::{
    category_children, category_entities, entity_speech_list, speech_view, ChildSummary, DebateView,
    EntitySummary, SpeechListItem, ViewedSpeech,
};
pub use event::{Condition, EventInput, EventKind, NavEvent, System, Task};
pub use log::{read_log_dir, LogRecord, SessionLog};
pub use session::{apply_event, Session, SessionHeader};
pub use store::SessionStore;

pub(crate) fn duration_minutes(events: &[NavEvent]) -> f64 {
    match (events.first(), events.last()) {
        (Some(first), Some(last)) => (last.timestamp - first.timestamp).num_milliseconds() as f64 / 60_000.0,
        _ => 0.0,
    }
}
