//! Append-only usage event log in JSON lines.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Query,
    View,
    Edit,
    Submit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UsageEvent {
    pub seq: u64,
    pub timestamp: i64,
    pub session_id: String,
    pub kind: EventKind,
    pub payload: Value,
}

struct Inner {
    next_seq: u64,
    memory: Vec<UsageEvent>,
}

/// Events are numbered in append order. Without a backing file they are
/// kept in memory.
pub struct EventLog {
    path: Option<PathBuf>,
    inner: Mutex<Inner>,
}

impl EventLog {
    pub fn open(path: &Path) -> std::io::Result<Self> {
        let existing = match std::fs::read_to_string(path) {
            Ok(t) => t.lines().filter(|l| !l.trim().is_empty()).count() as u64,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => 0,
            Err(e) => return Err(e),
        };
        Ok(EventLog {
            path: Some(path.to_path_buf()),
            inner: Mutex::new(Inner {
                next_seq: existing + 1,
                memory: Vec::new(),
            }),
        })
    }

    pub fn in_memory() -> Self {
        EventLog {
            path: None,
            inner: Mutex::new(Inner {
                next_seq: 1,
                memory: Vec::new(),
            }),
        }
    }

    pub fn record(
        &self,
        session_id: &str,
        kind: EventKind,
        timestamp: i64,
        payload: Value,
    ) -> std::io::Result<UsageEvent> {
        let mut inner = self.inner.lock().unwrap_or_else(|p| p.into_inner());
        let event = UsageEvent {
            seq: inner.next_seq,
            timestamp,
            session_id: session_id.to_string(),
            kind,
            payload,
        };
        match &self.path {
            Some(path) => {
                let mut line = serde_json::to_string(&event).expect("events serialize");
                line.push('\n');
                OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(path)?
                    .write_all(line.as_bytes())?;
            }
            None => inner.memory.push(event.clone()),
        }
        inner.next_seq += 1;
        Ok(event)
    }

    /// Every event so far, oldest first.
    pub fn read_all(&self) -> std::io::Result<Vec<UsageEvent>> {
        let inner = self.inner.lock().unwrap_or_else(|p| p.into_inner());
        match &self.path {
            None => Ok(inner.memory.clone()),
            Some(path) => {
                let text = match std::fs::read_to_string(path) {
                    Ok(t) => t,
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
                    Err(e) => return Err(e),
                };
                text.lines()
                    .filter(|l| !l.trim().is_empty())
                    .map(|l| {
                        serde_json::from_str(l).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
                    })
                    .collect()
            }
        }
    }
}
