use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::{Mode, SessionError};
use crate::act::ActionResult;
use crate::clients::ServiceKind;
use crate::describe::{ChangeAssessment, Origin, Priority, QueueEffect};
use crate::detect::DetectionEvent;
use crate::frames::InputKind;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogEntry {
    Mode { mode: Mode },
    Event { event: DetectionEvent },
    Change { assessment: ChangeAssessment },
    Speech { text: String, priority: Priority, origin: Origin, effect: QueueEffect },
    Input { input: InputKind },
    Action { result: ActionResult },
    Unsupported { action: String },
    Queue {
        control: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        text: Option<String>,
    },
    ClientCall { service: ServiceKind, ok: bool, detail: String },
    Adapter { accepted: bool, detail: String },
    Warning { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogRecord {
    pub t_ms: u64,
    #[serde(flatten)]
    pub entry: LogEntry,
}

/// Append-only session record with non-decreasing timestamps, optionally
/// mirrored to a JSON-lines file.
#[derive(Debug, Default)]
pub struct SessionLog {
    records: Vec<LogRecord>,
    sink: Option<(String, BufWriter<File>)>,
}

impl SessionLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn to_file(path: &Path) -> Result<Self, SessionError> {
        let err = |source| SessionError::Log { path: path.display().to_string(), source };
        let file = File::create(path).map_err(err)?;
        Ok(SessionLog { records: Vec::new(), sink: Some((path.display().to_string(), BufWriter::new(file))) })
    }

    /// Appends `entry`; a timestamp earlier than the last one is raised to it.
    pub fn push(&mut self, t_ms: u64, entry: LogEntry) {
        let t_ms = t_ms.max(self.records.last().map_or(0, |r| r.t_ms));
        let record = LogRecord { t_ms, entry };
        if let Some((path, w)) = &mut self.sink {
            let line = serde_json::to_string(&record).expect("log records serialize");
            if let Err(e) = writeln!(w, "{line}") {
                tracing::warn!("cannot write {path}: {e}");
            }
        }
        self.records.push(record);
    }

    pub fn flush(&mut self) -> Result<(), SessionError> {
        if let Some((path, w)) = &mut self.sink {
            w.flush().map_err(|source| SessionError::Log { path: path.clone(), source })?;
        }
        Ok(())
    }

    pub fn records(&self) -> &[LogRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn speech(&self) -> impl Iterator<Item = &str> {
        self.records.iter().filter_map(|r| match &r.entry {
            LogEntry::Speech { text, .. } => Some(text.as_str()),
            _ => None,
        })
    }

    pub fn events(&self) -> impl Iterator<Item = &DetectionEvent> {
        self.records.iter().filter_map(|r| match &r.entry {
            LogEntry::Event { event } => Some(event),
            _ => None,
        })
    }
}
