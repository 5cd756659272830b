//! Records resolved by label from a data directory, backed by an optional cache.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::cache::{CacheStore, PutOutcome};
use super::record::{ingest_record, ClassGroupRecord, OrderRecord, ParsedRecord};
use crate::error::Result;

#[derive(Clone, Debug, Default)]
pub struct RecordLibrary {
    groups: BTreeMap<String, ClassGroupRecord>,
    orders: BTreeMap<String, OrderRecord>,
    rejected: Vec<(PathBuf, String)>,
    cache: Option<CacheStore>,
}

fn is_record_file(p: &Path) -> bool {
    matches!(p.extension().and_then(|e| e.to_str()), Some("wtrec" | "wtord"))
}

/// Record files under a path (a file or a directory, not recursive), sorted.
pub fn record_files(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut out: Vec<PathBuf> = std::fs::read_dir(path)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_record_file(p))
        .collect();
    out.sort();
    Ok(out)
}

impl RecordLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cache(mut self, cache: CacheStore) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn cache(&self) -> Option<&CacheStore> {
        self.cache.as_ref()
    }

    /// Loads every record file in `dir`. Invalid files are kept as rejections, not errors.
    pub fn load_dir(&mut self, dir: &Path) -> Result<usize> {
        let mut n = 0;
        for p in record_files(dir)? {
            match ingest_record(&p) {
                Ok(r) => {
                    self.insert(r);
                    n += 1;
                }
                Err(e) => {
                    log::warn!("rejected {}: {e}", p.display());
                    self.rejected.push((p, e.to_string()));
                }
            }
        }
        Ok(n)
    }

    pub fn insert(&mut self, r: ParsedRecord) {
        match r {
            ParsedRecord::Group(g) => {
                let keep = self.groups.get(&g.field.label).is_some_and(|old| old.assurance >= g.assurance);
                if !keep {
                    self.groups.insert(g.field.label.clone(), g);
                }
            }
            ParsedRecord::Order(o) => {
                self.orders.insert(o.label.clone(), o);
            }
        }
    }

    pub fn rejected(&self) -> &[(PathBuf, String)] {
        &self.rejected
    }

    pub fn len(&self) -> usize {
        self.groups.len() + self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Group record by label: loaded records first, then the cache.
    pub fn group(&self, label: &str) -> Option<ClassGroupRecord> {
        if let Some(g) = self.groups.get(label) {
            return Some(g.clone());
        }
        match self.cache.as_ref()?.get(label, "") {
            Some(ParsedRecord::Group(g)) => Some(g),
            _ => None,
        }
    }

    pub fn order(&self, label: &str) -> Option<OrderRecord> {
        if let Some(o) = self.orders.get(label) {
            return Some(o.clone());
        }
        match self.cache.as_ref()?.get_order(label) {
            Some(ParsedRecord::Order(o)) => Some(o),
            _ => None,
        }
    }

    /// Writes a record through to the cache, if one is attached.
    pub fn remember(&self, r: &ParsedRecord, params: &str) -> Result<Option<PutOutcome>> {
        match &self.cache {
            Some(c) => c.put(r, params).map(Some),
            None => Ok(None),
        }
    }
}
