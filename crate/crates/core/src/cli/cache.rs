//! Persistent cache of quadratic-field data.
//!
//! The file holds one JSON [`CacheEntry`] per line and is only ever appended
//! to; on load the last entry for a key wins. About 1% of the loaded entries
//! (at least one) are recomputed on every load, and any mismatch is replaced
//! by the recomputed value.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::criterion::QuadSource;
use crate::quadratic::{fundamental_discriminant, PellUnit, QuadData, QuadError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    /// Fundamental discriminant.
    pub key: i64,
    pub h: u64,
    pub unit: Option<PellUnit>,
}

fn radicand(disc: i64) -> i64 {
    if disc % 4 == 0 {
        disc / 4
    } else {
        disc
    }
}

impl CacheEntry {
    fn from_data(q: &QuadData) -> Self {
        Self {
            key: q.disc,
            h: q.h,
            unit: q.unit.clone(),
        }
    }

    fn to_data(&self) -> QuadData {
        QuadData {
            d: radicand(self.key),
            disc: self.key,
            h: self.h,
            unit: self.unit.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub loaded: usize,
    pub malformed_lines: usize,
    pub spot_checked: usize,
    pub corrupted: Vec<i64>,
}

/// Class-number cache. Lookups read an immutable snapshot; new entries are
/// written by [`ClassCache::warm`] under a single lock.
#[derive(Debug, Default)]
pub struct ClassCache {
    entries: HashMap<i64, QuadData>,
    path: Option<PathBuf>,
    writer: Mutex<()>,
}

impl ClassCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (or starts) the cache at `path`.
    pub fn open(path: &Path) -> Result<(Self, LoadStats), CliError> {
        let mut stats = LoadStats::default();
        let mut latest: BTreeMap<i64, CacheEntry> = BTreeMap::new();
        if path.exists() {
            let file = File::open(path).map_err(|e| CliError::io(path, e))?;
            for line in BufReader::new(file).lines() {
                let line = line.map_err(|e| CliError::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<CacheEntry>(&line) {
                    Ok(entry) => {
                        latest.insert(entry.key, entry);
                    }
                    Err(_) => stats.malformed_lines += 1,
                }
            }
        }
        stats.loaded = latest.len();

        let mut entries = HashMap::with_capacity(latest.len());
        let sample_every = 100;
        let mut repaired = Vec::new();
        for (i, (key, entry)) in latest.into_iter().enumerate() {
            let data = entry.to_data();
            if i % sample_every == 0 {
                stats.spot_checked += 1;
                let fresh = fundamental_discriminant(data.d).and_then(|_| QuadData::compute(data.d));
                match fresh {
                    Ok(fresh) if fresh == data => {}
                    Ok(fresh) => {
                        stats.corrupted.push(key);
                        repaired.push(CacheEntry::from_data(&fresh));
                        entries.insert(key, fresh);
                        continue;
                    }
                    Err(_) => {
                        stats.corrupted.push(key);
                        continue;
                    }
                }
            }
            entries.insert(key, data);
        }
        let cache = Self {
            entries,
            path: Some(path.to_path_buf()),
            writer: Mutex::new(()),
        };
        cache.append(&repaired)?;
        Ok((cache, stats))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, disc: i64) -> Option<&QuadData> {
        self.entries.get(&disc)
    }

    fn append(&self, new: &[CacheEntry]) -> Result<(), CliError> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        if new.is_empty() {
            return Ok(());
        }
        let _guard = self.writer.lock().expect("cache writer poisoned");
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| CliError::io(path, e))?;
        let mut buf = String::new();
        for entry in new {
            buf.push_str(&serde_json::to_string(entry).expect("entry serializes"));
            buf.push('\n');
        }
        file.write_all(buf.as_bytes()).map_err(|e| CliError::io(path, e))
    }

    /// Computes every missing radicand (in parallel), adds it to the
    /// snapshot, and appends it to the file in key order.
    pub fn warm(&mut self, radicands: &[i64]) -> Result<usize, CliError> {
        let mut missing: Vec<i64> = radicands
            .iter()
            .copied()
            .filter(|&d| {
                fundamental_discriminant(d).is_ok_and(|disc| !self.entries.contains_key(&disc))
            })
            .collect();
        missing.sort_unstable();
        missing.dedup();
        let computed: Vec<QuadData> = missing
            .par_iter()
            .filter_map(|&d| QuadData::compute(d).ok())
            .collect();
        let mut new: Vec<CacheEntry> = computed.iter().map(CacheEntry::from_data).collect();
        new.sort_by_key(|e| e.key);
        self.append(&new)?;
        for q in computed {
            self.entries.insert(q.disc, q);
        }
        Ok(new.len())
    }
}

impl QuadSource for ClassCache {
    fn quad(&self, d: i64) -> Result<QuadData, QuadError> {
        let disc = fundamental_discriminant(d)?;
        match self.entries.get(&disc) {
            Some(q) => Ok(q.clone()),
            None => QuadData::compute(d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_last_writer_wins() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let (mut cache, stats) = ClassCache::open(&path).unwrap();
        assert_eq!(stats.loaded, 0);
        assert_eq!(cache.warm(&[-1, 3, -23, 3, 10]).unwrap(), 4);
        assert_eq!(cache.warm(&[3]).unwrap(), 0);

        let (cache2, stats) = ClassCache::open(&path).unwrap();
        assert_eq!(stats.loaded, 4);
        assert!(stats.corrupted.is_empty());
        assert_eq!(cache2.get(-23).unwrap().h, 3);
        assert_eq!(cache2.quad(10).unwrap(), QuadData::compute(10).unwrap());

        // a later line overrides an earlier one
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        writeln!(f, "{{\"key\":-4,\"h\":1,\"unit\":null}}").unwrap();
        writeln!(f, "not json").unwrap();
        let (_, stats) = ClassCache::open(&path).unwrap();
        assert_eq!(stats.malformed_lines, 1);
    }

    #[test]
    fn corruption_is_detected_by_spot_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        // the first key in order is always spot-checked
        std::fs::write(&path, "{\"key\":-23,\"h\":5,\"unit\":null}\n").unwrap();
        let (cache, stats) = ClassCache::open(&path).unwrap();
        assert_eq!(stats.corrupted, vec![-23]);
        assert_eq!(cache.get(-23).unwrap().h, 3);
        let (_, stats) = ClassCache::open(&path).unwrap();
        assert!(stats.corrupted.is_empty());
    }
}
