//! Structured corpus: normalized signs with provenance, deduplicated by
//! placement set and weighted by an occurrence counter.
//!
//! On disk the corpus is an append-only JSON-lines log. The first line is
//! the header `{"format":"sword-corpus","version":1}`; every later line
//! records one ingested sign. Replaying a log rebuilds the store, and a
//! repeated `entry_id` bumps that entry's occurrence counter.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CorpusError, Granularity};
use crate::iswa::{Catalog, GlyphId};
use crate::swml::{normalize_sign, Sign, SignDocument, SignSource, SwmlError};

pub const CORPUS_FORMAT: &str = "sword-corpus";
pub const CORPUS_VERSION: u32 = 1;

pub type Provenance = SignSource;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReviewStatus {
    #[default]
    Raw,
    Reviewed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub entry_id: String,
    pub sign: Sign,
    pub provenance: Provenance,
    pub review_status: ReviewStatus,
    pub ingested_at: u64,
    pub occurrences: u64,
}

impl CorpusEntry {
    /// Distinct glyph keys of the sign at the given granularity.
    pub fn glyph_keys(&self, granularity: Granularity) -> Vec<GlyphId> {
        let mut keys: Vec<GlyphId> = self
            .sign
            .placements
            .iter()
            .map(|p| granularity.key(p.glyph))
            .collect();
        keys.sort();
        keys.dedup();
        keys
    }
}

pub enum IngestItem<'a> {
    Sign(&'a Sign),
    Document(&'a SignDocument),
}

impl<'a> From<&'a Sign> for IngestItem<'a> {
    fn from(s: &'a Sign) -> Self {
        IngestItem::Sign(s)
    }
}

impl<'a> From<&'a SignDocument> for IngestItem<'a> {
    fn from(d: &'a SignDocument) -> Self {
        IngestItem::Document(d)
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
}

#[derive(Serialize, Deserialize)]
struct Record {
    entry_id: String,
    sign: Sign,
    provenance: Provenance,
    review_status: ReviewStatus,
    ingested_at: u64,
}

type DedupKey = Vec<(GlyphId, u32, u32)>;

fn dedup_key(sign: &Sign) -> DedupKey {
    let mut key: DedupKey = sign.placements.iter().map(|p| (p.glyph, p.x, p.y)).collect();
    key.sort();
    key
}

fn entry_id_for(key: &DedupKey) -> String {
    let mut hasher = Sha256::new();
    for (g, x, y) in key {
        hasher.update(format!("{g} {x} {y};").as_bytes());
    }
    let digest = hasher.finalize();
    format!("e{}", hex::encode(&digest[..8]))
}

/// In-memory corpus, optionally backed by a log file.
#[derive(Debug, Default)]
pub struct CorpusStore {
    entries: Vec<CorpusEntry>,
    by_key: HashMap<DedupKey, usize>,
    log: Option<PathBuf>,
}

impl CorpusStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (or creates) a corpus log and replays it.
    pub fn open(path: &Path) -> Result<Self, CorpusError> {
        let io = |source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut store = CorpusStore {
            log: Some(path.to_path_buf()),
            ..Self::default()
        };
        if !path.exists() {
            let mut f = File::create(path).map_err(io)?;
            let header = serde_json::to_string(&Header {
                format: CORPUS_FORMAT.into(),
                version: CORPUS_VERSION,
            })
            .expect("header serializes");
            writeln!(f, "{header}").map_err(io)?;
            return Ok(store);
        }
        let reader = BufReader::new(File::open(path).map_err(io)?);
        let mut lines = reader.lines().enumerate();
        let header_line = match lines.next() {
            Some((_, line)) => line.map_err(io)?,
            None => return Err(CorpusError::CorruptCorpus { line: 1, reason: "missing header".into() }),
        };
        let header: Header = serde_json::from_str(&header_line).map_err(|e| CorpusError::CorruptCorpus {
            line: 1,
            reason: e.to_string(),
        })?;
        if header.format != CORPUS_FORMAT {
            return Err(CorpusError::CorruptCorpus {
                line: 1,
                reason: format!("not a corpus file ({})", header.format),
            });
        }
        if header.version != CORPUS_VERSION {
            return Err(CorpusError::VersionMismatch {
                found: header.version,
                expected: CORPUS_VERSION,
            });
        }
        for (idx, line) in lines {
            let line = line.map_err(io)?;
            if line.trim().is_empty() {
                continue;
            }
            let record: Record = serde_json::from_str(&line).map_err(|e| CorpusError::CorruptCorpus {
                line: idx + 1,
                reason: e.to_string(),
            })?;
            store.apply(record);
        }
        Ok(store)
    }

    fn apply(&mut self, record: Record) -> String {
        let key = dedup_key(&record.sign);
        match self.by_key.get(&key) {
            Some(&i) => {
                let entry = &mut self.entries[i];
                entry.occurrences += 1;
                entry.review_status = entry.review_status.max(record.review_status);
                entry.entry_id.clone()
            }
            None => {
                self.by_key.insert(key, self.entries.len());
                self.entries.push(CorpusEntry {
                    entry_id: record.entry_id.clone(),
                    sign: record.sign,
                    provenance: record.provenance,
                    review_status: record.review_status,
                    ingested_at: record.ingested_at,
                    occurrences: 1,
                });
                record.entry_id
            }
        }
    }

    pub fn ingest<'a>(
        &mut self,
        catalog: &Catalog,
        item: impl Into<IngestItem<'a>>,
        provenance: Provenance,
        review_status: ReviewStatus,
    ) -> Result<Vec<String>, CorpusError> {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        self.ingest_at(catalog, item, provenance, review_status, now)
    }

    /// Normalizes and stores every sign of `item`, returning one entry id per
    /// sign. Nothing is stored when any sign fails validation.
    pub fn ingest_at<'a>(
        &mut self,
        catalog: &Catalog,
        item: impl Into<IngestItem<'a>>,
        provenance: Provenance,
        review_status: ReviewStatus,
        ingested_at: u64,
    ) -> Result<Vec<String>, CorpusError> {
        let signs: Vec<&Sign> = match item.into() {
            IngestItem::Sign(s) => vec![s],
            IngestItem::Document(d) => d.signs().collect(),
        };
        let mut records = Vec::with_capacity(signs.len());
        for sign in signs {
            if sign.placements.is_empty() {
                return Err(CorpusError::EmptySign(sign.sign_id.clone()));
            }
            if let Some(p) = sign.placements.iter().find(|p| !catalog.contains(&p.glyph)) {
                return Err(CorpusError::UnknownGlyph(p.glyph));
            }
            let normalized = normalize_sign(sign, catalog).map_err(|e| match e {
                SwmlError::UnknownGlyph(g) => CorpusError::UnknownGlyph(g),
                other => CorpusError::InvalidSign(other.to_string()),
            })?;
            normalized.check().map_err(|e| CorpusError::InvalidSign(e.to_string()))?;
            records.push(Record {
                entry_id: entry_id_for(&dedup_key(&normalized)),
                sign: Sign {
                    source: provenance,
                    ..normalized
                },
                provenance,
                review_status,
                ingested_at,
            });
        }
        if let Some(path) = &self.log {
            let io = |source| CorpusError::Io {
                path: path.display().to_string(),
                source,
            };
            let mut f = OpenOptions::new().append(true).open(path).map_err(io)?;
            let mut buf = String::new();
            for r in &records {
                buf.push_str(&serde_json::to_string(r).expect("record serializes"));
                buf.push('\n');
            }
            f.write_all(buf.as_bytes()).map_err(io)?;
        }
        Ok(records.into_iter().map(|r| self.apply(r)).collect())
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn entry(&self, entry_id: &str) -> Option<&CorpusEntry> {
        self.entries.iter().find(|e| e.entry_id == entry_id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of occurrence counters.
    pub fn total_signs(&self) -> u64 {
        self.entries.iter().map(|e| e.occurrences).sum()
    }

    /// Number of stored signs containing each glyph; a glyph used twice in
    /// one sign counts once for it.
    pub fn stats_frequency(&self, granularity: Granularity) -> BTreeMap<GlyphId, u64> {
        let mut freq = BTreeMap::new();
        for entry in &self.entries {
            for key in entry.glyph_keys(granularity) {
                *freq.entry(key).or_insert(0) += entry.occurrences;
            }
        }
        freq
    }

    /// Weighted distinct glyph sets, the transactions behind every
    /// statistic.
    pub fn glyph_sets(&self, granularity: Granularity) -> Vec<(Vec<GlyphId>, u64)> {
        let mut sets: BTreeMap<Vec<GlyphId>, u64> = BTreeMap::new();
        for entry in &self.entries {
            *sets.entry(entry.glyph_keys(granularity)).or_insert(0) += entry.occurrences;
        }
        sets.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swml::{Column, DocumentMeta, GlyphPlacement};
    use crate::testutil::*;

    #[test]
    fn same_sign_twice_is_one_entry() {
        let cat = toy_catalog();
        let mut store = CorpusStore::in_memory();
        let s = sign_of("x", &[a(), b()]);
        let first = store.ingest_at(&cat, &s, Provenance::Editor, ReviewStatus::Reviewed, 1).unwrap();
        // same shape shifted: identical once normalized
        let mut shifted = s.clone();
        for p in &mut shifted.placements {
            p.x += 7;
            p.y += 3;
        }
        let second = store.ingest_at(&cat, &shifted, Provenance::Editor, ReviewStatus::Raw, 2).unwrap();
        assert_eq!(first, second);
        assert_eq!(store.len(), 1);
        assert_eq!(store.entries()[0].occurrences, 2);
        assert_eq!(store.total_signs(), 2);
    }

    #[test]
    fn document_with_three_signs_gives_three_ids() {
        let cat = toy_catalog();
        let doc = SignDocument {
            meta: DocumentMeta::default(),
            columns: vec![Column { signs: toy_signs() }],
        };
        let mut store = CorpusStore::in_memory();
        let ids = store.ingest_at(&cat, &doc, Provenance::Import, ReviewStatus::Raw, 0).unwrap();
        assert_eq!(ids.len(), 3);
        assert_eq!(ids.iter().collect::<std::collections::HashSet<_>>().len(), 3);
    }

    #[test]
    fn unknown_glyph_is_rejected_atomically() {
        let cat = toy_catalog();
        let stranger: GlyphId = "05-01-001-01-01-01".parse().unwrap();
        let doc = SignDocument {
            meta: DocumentMeta::default(),
            columns: vec![Column {
                signs: vec![sign_of("ok", &[a()]), sign_of("bad", &[stranger])],
            }],
        };
        let mut store = CorpusStore::in_memory();
        assert!(matches!(
            store.ingest_at(&cat, &doc, Provenance::Ogr, ReviewStatus::Raw, 0),
            Err(CorpusError::UnknownGlyph(g)) if g == stranger
        ));
        assert!(store.is_empty());
        assert!(matches!(
            store.ingest_at(&cat, &Sign::new("e", vec![]), Provenance::Ogr, ReviewStatus::Raw, 0),
            Err(CorpusError::EmptySign(_))
        ));
    }

    #[test]
    fn frequency_counts_signs_not_tokens() {
        let cat = toy_catalog();
        let mut store = CorpusStore::in_memory();
        assert!(store.stats_frequency(Granularity::FullId).is_empty());
        for s in toy_signs() {
            store.ingest_at(&cat, &s, Provenance::Editor, ReviewStatus::Raw, 0).unwrap();
        }
        let f = store.stats_frequency(Granularity::FullId);
        assert_eq!((f[&a()], f[&b()], f[&c()]), (3, 2, 2));

        let mut store = CorpusStore::in_memory();
        let twice = Sign::new(
            "t",
            vec![GlyphPlacement::new(a(), 0, 0), GlyphPlacement::new(a(), 30, 0)],
        );
        store.ingest_at(&cat, &twice, Provenance::Editor, ReviewStatus::Raw, 0).unwrap();
        assert_eq!(store.stats_frequency(Granularity::FullId)[&a()], 1);
    }

    #[test]
    fn log_replay_restores_counters() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        let cat = toy_catalog();
        {
            let mut store = CorpusStore::open(&path).unwrap();
            for s in toy_signs() {
                store.ingest_at(&cat, &s, Provenance::Editor, ReviewStatus::Raw, 0).unwrap();
            }
            store.ingest_at(&cat, &toy_signs()[0], Provenance::Ogr, ReviewStatus::Reviewed, 5).unwrap();
        }
        let store = CorpusStore::open(&path).unwrap();
        assert_eq!(store.len(), 3);
        assert_eq!(store.total_signs(), 4);
        assert_eq!(store.entries()[0].occurrences, 2);
        assert_eq!(store.entries()[0].review_status, ReviewStatus::Reviewed);
    }

    #[test]
    fn log_with_future_version_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(&path, "{\"format\":\"sword-corpus\",\"version\":9}\n").unwrap();
        assert!(matches!(
            CorpusStore::open(&path),
            Err(CorpusError::VersionMismatch { found: 9, .. })
        ));
        std::fs::write(&path, "{\"format\":\"sword-corpus\",\"version\":1}\n{broken\n").unwrap();
        assert!(matches!(CorpusStore::open(&path), Err(CorpusError::CorruptCorpus { line: 2, .. })));
    }
}
