use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use super::session::{Session, SessionHeader};

/// Concurrent map of live sessions. Each session sits behind its own
/// mutex, so writes to one session serialize while distinct sessions
/// proceed independently.
#[derive(Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a fresh session; returns false if the id is taken.
    pub fn create(&self, header: SessionHeader) -> bool {
        let mut map = self.sessions.write().unwrap_or_else(|e| e.into_inner());
        if map.contains_key(&header.session_id) {
            return false;
        }
        map.insert(header.session_id.clone(), Arc::new(Mutex::new(Session::new(header))));
        true
    }

    pub fn get(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(id)
            .cloned()
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
