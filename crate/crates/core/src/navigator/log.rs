use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::event::NavEvent;
use super::session::{Session, SessionHeader};
use crate::error::{Error, Result};

/// One line of a session log file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum LogRecord {
    Header(SessionHeader),
    Event(NavEvent),
}

/// A session's header and events, as persisted: one JSON record per line,
/// header first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionLog {
    pub header: SessionHeader,
    pub events: Vec<NavEvent>,
}

impl From<&Session> for SessionLog {
    fn from(s: &Session) -> Self {
        SessionLog {
            header: s.header().clone(),
            events: s.events().to_vec(),
        }
    }
}

impl SessionLog {
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&LogRecord::Header(self.header.clone())).expect("header serializes");
        out.push('\n');
        for e in &self.events {
            out.push_str(&serde_json::to_string(&LogRecord::Event(e.clone())).expect("event serializes"));
            out.push('\n');
        }
        out
    }

    /// Parse and check a log: exactly one leading header, well-shaped events
    /// and nondecreasing timestamps.
    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut header = None;
        let mut events: Vec<NavEvent> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |msg: String| Error::MalformedLog(format!("line {}: {msg}", n + 1));
            let record: LogRecord = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
            match record {
                LogRecord::Header(h) => {
                    if header.is_some() || !events.is_empty() {
                        return Err(bad("header must be the single first record".into()));
                    }
                    header = Some(h);
                }
                LogRecord::Event(e) => {
                    if header.is_none() {
                        return Err(bad("event before header".into()));
                    }
                    e.check_shape().map_err(bad)?;
                    if events.last().is_some_and(|last| e.timestamp < last.timestamp) {
                        return Err(bad("timestamps decrease".into()));
                    }
                    events.push(e);
                }
            }
        }
        let header = header.ok_or_else(|| Error::MalformedLog("missing header record".into()))?;
        Ok(SessionLog { header, events })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_jsonl(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_jsonl())?;
        Ok(())
    }

    pub fn file_name(&self) -> String {
        format!("{}.jsonl", self.header.session_id)
    }

    pub fn duration_minutes(&self) -> f64 {
        super::duration_minutes(&self.events)
    }
}

/// Every `*.jsonl` log in a directory, sorted by file name.
pub fn read_log_dir(dir: impl AsRef<Path>) -> Result<Vec<SessionLog>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            SessionLog::read(p).map_err(|e| match e {
                Error::MalformedLog(m) => Error::MalformedLog(format!("{}: {m}", p.display())),
                other => other,
            })
        })
        .collect()
}
