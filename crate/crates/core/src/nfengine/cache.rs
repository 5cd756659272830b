//! On-disk record cache.
//!
//! One slot per field label and record kind. A slot file holds the record text; `index.tsv`
//! lists `slot  kind  label  params-hash  assurance`. Writers take `.lock` (created exclusively)
//! for the whole read-modify-write; readers never lock and only see atomically renamed files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::thread::sleep;
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};

use super::record::{parse_record, Assurance, ParsedRecord};
use crate::error::{Error, Result};

const LOCK_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PutOutcome {
    Stored,
    Replaced,
    AlreadyCached,
    /// An existing entry of at least equal assurance was kept.
    Kept,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexEntry {
    pub slot: String,
    pub kind: String,
    pub label: String,
    pub params_hash: String,
    pub assurance: Assurance,
}

#[derive(Clone, Debug)]
pub struct CacheStore {
    dir: PathBuf,
}

struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

fn hex_digest(s: &str) -> String {
    let d = Sha256::digest(s.as_bytes());
    d.iter().map(|b| format!("{b:02x}")).collect()
}

fn kind_of(r: &ParsedRecord) -> &'static str {
    match r {
        ParsedRecord::Group(_) => "group",
        ParsedRecord::Order(_) => "order",
    }
}

impl ParsedRecord {
    pub fn label(&self) -> &str {
        match self {
            ParsedRecord::Group(g) => &g.field.label,
            ParsedRecord::Order(o) => &o.label,
        }
    }

    pub fn assurance(&self) -> Assurance {
        match self {
            ParsedRecord::Group(g) => g.assurance,
            ParsedRecord::Order(_) => Assurance::IngestedTrusted,
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            ParsedRecord::Group(g) => g.to_text(),
            ParsedRecord::Order(o) => o.to_text(),
        }
    }
}

impl CacheStore {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        Ok(CacheStore { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn slot(kind: &str, label: &str) -> String {
        hex_digest(&format!("{kind}\0{label}"))[..32].to_string()
    }

    fn slot_path(&self, slot: &str) -> PathBuf {
        self.dir.join(format!("{slot}.wt"))
    }

    fn lock(&self) -> Result<LockGuard> {
        let path = self.dir.join(".lock");
        let start = Instant::now();
        loop {
            match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(mut f) => {
                    let _ = writeln!(f, "{}", std::process::id());
                    return Ok(LockGuard(path));
                }
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    if start.elapsed() > LOCK_TIMEOUT {
                        return Err(Error::Io(format!("cache lock {} held too long", path.display())));
                    }
                    sleep(Duration::from_millis(5));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }

    fn write_atomic(&self, name: &Path, text: &str) -> Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(text.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(name).map_err(|e| Error::Io(e.to_string()))?;
        Ok(())
    }

    /// Entries keyed by slot. Malformed lines are skipped with a warning.
    pub fn index(&self) -> BTreeMap<String, IndexEntry> {
        let mut out = BTreeMap::new();
        let Ok(text) = fs::read_to_string(self.dir.join("index.tsv")) else {
            return out;
        };
        for line in text.lines() {
            let f: Vec<&str> = line.split('\t').collect();
            let parsed = (f.len() == 5).then(|| Assurance::parse(f[4]).ok()).flatten();
            match parsed {
                Some(assurance) => {
                    out.insert(
                        f[0].to_string(),
                        IndexEntry {
                            slot: f[0].into(),
                            kind: f[1].into(),
                            label: f[2].into(),
                            params_hash: f[3].into(),
                            assurance,
                        },
                    );
                }
                None => log::warn!("skipping malformed cache index line {line:?}"),
            }
        }
        out
    }

    fn write_index(&self, idx: &BTreeMap<String, IndexEntry>) -> Result<()> {
        let mut s = String::new();
        for e in idx.values() {
            s.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", e.slot, e.kind, e.label, e.params_hash, e.assurance));
        }
        self.write_atomic(&self.dir.join("index.tsv"), &s)
    }

    fn read_slot(&self, kind: &str, label: &str) -> Option<ParsedRecord> {
        let path = self.slot_path(&Self::slot(kind, label));
        let text = fs::read_to_string(&path).ok()?;
        match parse_record(&text) {
            Ok(r) if r.label() == label && kind_of(&r) == kind => {
                if let ParsedRecord::Group(g) = &r {
                    if let Err(e) = g.validate() {
                        log::warn!("ignoring corrupt cache entry {}: {e}", path.display());
                        return None;
                    }
                }
                Some(r)
            }
            Ok(_) => {
                log::warn!("ignoring cache entry {} with a mismatched label", path.display());
                None
            }
            Err(e) => {
                log::warn!("ignoring corrupt cache entry {}: {e}", path.display());
                None
            }
        }
    }

    /// Group record for `label`. Heuristic entries only hit when computed with the same parameters.
    pub fn get(&self, label: &str, params: &str) -> Option<ParsedRecord> {
        let r = self.read_slot("group", label)?;
        if r.assurance() > Assurance::Heuristic {
            return Some(r);
        }
        let slot = Self::slot("group", label);
        let want = hex_digest(params);
        match self.index().get(&slot) {
            Some(e) if e.params_hash == want => Some(r),
            _ => None,
        }
    }

    pub fn get_order(&self, label: &str) -> Option<ParsedRecord> {
        self.read_slot("order", label)
    }

    /// Stores a record. An occupied slot is replaced only by a record of strictly higher assurance.
    pub fn put(&self, rec: &ParsedRecord, params: &str) -> Result<PutOutcome> {
        let _guard = self.lock()?;
        let kind = kind_of(rec);
        let slot = Self::slot(kind, rec.label());
        let text = rec.to_text();
        let outcome = match self.read_slot(kind, rec.label()) {
            Some(old) if old.to_text() == text => return Ok(PutOutcome::AlreadyCached),
            Some(old) if old.assurance() >= rec.assurance() => return Ok(PutOutcome::Kept),
            Some(_) => PutOutcome::Replaced,
            None => PutOutcome::Stored,
        };
        self.write_atomic(&self.slot_path(&slot), &text)?;
        let mut idx = self.index();
        idx.insert(
            slot.clone(),
            IndexEntry {
                slot,
                kind: kind.into(),
                label: rec.label().into(),
                params_hash: hex_digest(params),
                assurance: rec.assurance(),
            },
        );
        self.write_index(&idx)?;
        Ok(outcome)
    }

    /// Removes every entry.
    pub fn clear(&self) -> Result<()> {
        let _guard = self.lock()?;
        for e in fs::read_dir(&self.dir)? {
            let p = e?.path();
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            if name.ends_with(".wt") || name == "index.tsv" {
                fs::remove_file(&p)?;
            }
        }
        Ok(())
    }
}
