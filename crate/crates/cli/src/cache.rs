//! Append-only JSON-lines store of computed s-numbers.
//!
//! Keys are order independent (degree plus sorted type list), so one record
//! serves every ordering and both engine modes.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use snumber_core::partition::TypeList;

pub const ENGINE: &str = concat!("snumber-core ", env!("CARGO_PKG_VERSION"));

#[derive(Serialize, Deserialize)]
struct Record {
    key: String,
    s: String,
    engine: String,
}

pub fn key(t: &TypeList) -> String {
    format!("{}|{}", t.degree(), t.sorted_key())
}

pub struct Cache {
    path: PathBuf,
    known: Mutex<HashMap<String, i128>>,
}

impl Cache {
    /// Loads every record written by this engine version; records from other
    /// versions and unreadable lines are skipped.
    pub fn open(path: &Path) -> Result<Self> {
        let mut known = HashMap::new();
        if path.exists() {
            let file =
                File::open(path).with_context(|| format!("opening cache {}", path.display()))?;
            file.lock_shared()?;
            for line in BufReader::new(&file).lines() {
                let line = line?;
                let Ok(r) = serde_json::from_str::<Record>(&line) else {
                    continue;
                };
                if r.engine != ENGINE {
                    continue;
                }
                if let Ok(v) = r.s.parse() {
                    known.insert(r.key, v);
                }
            }
            file.unlock()?;
        }
        Ok(Cache {
            path: path.to_path_buf(),
            known: Mutex::new(known),
        })
    }

    pub fn get(&self, t: &TypeList) -> Option<i128> {
        self.known.lock().unwrap().get(&key(t)).copied()
    }

    /// Appends one record under an exclusive lock; no-op if already known.
    pub fn put(&self, t: &TypeList, s: i128) -> Result<()> {
        let k = key(t);
        let mut known = self.known.lock().unwrap();
        if known.contains_key(&k) {
            return Ok(());
        }
        let line = serde_json::to_string(&Record {
            key: k.clone(),
            s: s.to_string(),
            engine: ENGINE.to_string(),
        })?;
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .with_context(|| format!("opening cache {}", self.path.display()))?;
        file.lock()?;
        writeln!(file, "{line}")?;
        file.flush()?;
        file.unlock()?;
        known.insert(k, s);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_order_independence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let c = Cache::open(&path).unwrap();
        let t = TypeList::parse("2,2;2,1,1").unwrap();
        assert_eq!(c.get(&t), None);
        c.put(&t, 0).unwrap();
        c.put(&t, 0).unwrap();
        let again = Cache::open(&path).unwrap();
        assert_eq!(again.get(&TypeList::parse("2,1,1;2,2").unwrap()), Some(0));
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 1);
    }

    #[test]
    fn foreign_and_broken_lines_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        std::fs::write(
            &path,
            "not json\n{\"key\":\"3|2,1;2,1\",\"s\":\"7\",\"engine\":\"other\"}\n",
        )
        .unwrap();
        let c = Cache::open(&path).unwrap();
        assert_eq!(c.get(&TypeList::parse("2,1;2,1").unwrap()), None);
    }
}
