//! Description cache keyed by (image content hash, prompt key), persisted as
//! append-only JSON lines.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
#[error("description cache {path}: {source}")]
pub struct CacheIoError {
    pub path: String,
    #[source]
    pub source: std::io::Error,
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    k: String,
    p: String,
    t: String,
    at: u64,
}

#[derive(Debug, Default)]
pub struct DescriptionCache {
    entries: RwLock<HashMap<(u64, String), String>>,
    file: Option<(PathBuf, Mutex<File>)>,
}

impl DescriptionCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads every record already in `path` and appends new ones to it.
    /// Unreadable lines are skipped with a warning.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, CacheIoError> {
        let path = path.into();
        let err = |source| CacheIoError { path: path.display().to_string(), source };
        let mut entries = HashMap::new();
        if path.exists() {
            let text = std::fs::read_to_string(&path).map_err(err)?;
            for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                match serde_json::from_str::<Record>(line) {
                    Ok(r) => match u64::from_str_radix(&r.k, 16) {
                        Ok(k) => {
                            entries.insert((k, r.p), r.t);
                        }
                        Err(_) => tracing::warn!(line = n + 1, "cache record with a bad key"),
                    },
                    Err(e) => tracing::warn!(line = n + 1, "skipping unreadable cache record: {e}"),
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path).map_err(err)?;
        Ok(DescriptionCache { entries: RwLock::new(entries), file: Some((path, Mutex::new(file))) })
    }

    pub fn path(&self) -> Option<&Path> {
        self.file.as_ref().map(|(p, _)| p.as_path())
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, image_key: u64, prompt_key: &str) -> Option<String> {
        self.entries.read().expect("cache lock").get(&(image_key, prompt_key.to_string())).cloned()
    }

    /// Stores in memory first, so a failed write still serves this session.
    pub fn put(&self, image_key: u64, prompt_key: &str, text: &str, at: u64) -> Result<(), CacheIoError> {
        self.entries.write().expect("cache lock").insert((image_key, prompt_key.to_string()), text.to_string());
        let Some((path, file)) = &self.file else {
            return Ok(());
        };
        let rec = Record { k: format!("{image_key:016x}"), p: prompt_key.to_string(), t: text.to_string(), at };
        let line = serde_json::to_string(&rec).expect("serializable");
        let mut f = file.lock().expect("cache file lock");
        writeln!(f, "{line}").map_err(|source| CacheIoError { path: path.display().to_string(), source })
    }
}
