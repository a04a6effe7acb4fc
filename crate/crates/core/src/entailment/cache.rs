use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::EntailmentScore;

/// Stable content hash of a scoring request. Each field is length-prefixed,
/// so no two distinct triples can collide by concatenation.
pub fn cache_key(premise: &str, hypothesis: &str, model_name: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"stance-scope/v1");
    for field in [model_name, premise, hypothesis] {
        hasher.update((field.len() as u64).to_le_bytes());
        hasher.update(field.as_bytes());
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct Record {
    key: String,
    score: f64,
}

/// Append-only score store. Reads are concurrent; writes go through a single
/// mutex-guarded writer and are flushed per batch so an aborted run keeps
/// everything scored so far.
pub struct ScoreCache {
    path: Option<PathBuf>,
    entries: RwLock<HashMap<String, EntailmentScore>>,
    writer: Mutex<Option<BufWriter<File>>>,
}

impl ScoreCache {
    pub fn in_memory() -> Self {
        ScoreCache {
            path: None,
            entries: RwLock::new(HashMap::new()),
            writer: Mutex::new(None),
        }
    }

    /// Opens (or creates) a cache file. A torn final line from an
    /// interrupted write is skipped with a warning.
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        let mut entries = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (n, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<Record>(&line)
                    .ok()
                    .and_then(|r| EntailmentScore::new(r.score).ok().map(|s| (r.key, s)))
                {
                    Some((key, score)) => {
                        entries.entry(key).or_insert(score);
                    }
                    None => log::warn!("{}:{}: skipping unreadable cache record", path.display(), n + 1),
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(ScoreCache {
            path: Some(path),
            entries: RwLock::new(entries),
            writer: Mutex::new(Some(BufWriter::new(file))),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &str) -> Option<EntailmentScore> {
        self.entries.read().unwrap().get(key).copied()
    }

    pub fn insert_many(&self, records: &[(String, EntailmentScore)]) -> io::Result<()> {
        let mut writer = self.writer.lock().unwrap();
        let mut entries = self.entries.write().unwrap();
        for (key, score) in records {
            if entries.contains_key(key) {
                continue;
            }
            entries.insert(key.clone(), *score);
            if let Some(w) = writer.as_mut() {
                let line = serde_json::to_string(&Record {
                    key: key.clone(),
                    score: score.value(),
                })
                .map_err(io::Error::other)?;
                writeln!(w, "{line}")?;
            }
        }
        if let Some(w) = writer.as_mut() {
            w.flush()?;
        }
        Ok(())
    }

    /// Rewrites the file sorted by key, so its bytes depend only on its
    /// contents and not on the order parallel workers inserted them.
    pub fn compact(&self) -> io::Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let mut writer = self.writer.lock().unwrap();
        let entries = self.entries.read().unwrap();
        let mut sorted: Vec<_> = entries.iter().collect();
        sorted.sort_by(|a, b| a.0.cmp(b.0));

        let tmp = path.with_extension("tmp");
        {
            let mut out = BufWriter::new(File::create(&tmp)?);
            for (key, score) in sorted {
                let line = serde_json::to_string(&Record {
                    key: key.clone(),
                    score: score.value(),
                })
                .map_err(io::Error::other)?;
                writeln!(out, "{line}")?;
            }
            out.flush()?;
        }
        *writer = None;
        fs::rename(&tmp, path)?;
        *writer = Some(BufWriter::new(OpenOptions::new().append(true).open(path)?));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn score(v: f64) -> EntailmentScore {
        EntailmentScore::new(v).unwrap()
    }

    #[test]
    fn key_is_deterministic_and_model_sensitive() {
        let k = cache_key("p", "h", "m");
        assert_eq!(k, cache_key("p", "h", "m"));
        assert_ne!(k, cache_key("p", "h", "m2"));
        assert_eq!(k.len(), 64);
    }

    #[test]
    fn key_has_no_concatenation_ambiguity() {
        assert_ne!(cache_key("a", "b", "m"), cache_key("ab", "", "m"));
        assert_ne!(cache_key("", "ab", "m"), cache_key("ab", "", "m"));
    }

    #[test]
    fn round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let odd = 0.1 + 0.2;
        {
            let c = ScoreCache::open(&path).unwrap();
            c.insert_many(&[("a".into(), score(odd)), ("b".into(), score(0.97))]).unwrap();
        }
        let c = ScoreCache::open(&path).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.get("a").unwrap().value().to_bits(), odd.to_bits());
    }

    #[test]
    fn torn_line_is_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        fs::write(&path, "{\"key\":\"a\",\"score\":0.5}\n{\"key\":\"b\",\"sc").unwrap();
        let c = ScoreCache::open(&path).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c.get("b").is_none());
    }

    #[test]
    fn compaction_is_order_independent() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("one.jsonl");
        let p2 = dir.path().join("two.jsonl");
        let c1 = ScoreCache::open(&p1).unwrap();
        c1.insert_many(&[("x".into(), score(0.1)), ("y".into(), score(0.2))]).unwrap();
        c1.compact().unwrap();
        let c2 = ScoreCache::open(&p2).unwrap();
        c2.insert_many(&[("y".into(), score(0.2))]).unwrap();
        c2.insert_many(&[("x".into(), score(0.1))]).unwrap();
        c2.compact().unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
        // Still appendable after compaction.
        c2.insert_many(&[("z".into(), score(0.3))]).unwrap();
        assert_eq!(ScoreCache::open(&p2).unwrap().len(), 3);
    }
}
