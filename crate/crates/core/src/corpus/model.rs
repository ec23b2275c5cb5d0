//! Co-occurrence statistics over the corpus and their snapshot file.
//!
//! Snapshot layout:
//!
//! ```text
//! sword-cooc-model <version>
//! sha256:<hex digest of the payload line>
//! <payload: one line of JSON>
//! ```

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::store::CorpusStore;
use super::{CorpusError, Granularity};
use crate::iswa::GlyphId;

pub const MODEL_MAGIC: &str = "sword-cooc-model";
pub const MODEL_VERSION: u32 = 1;

/// A distinct glyph set and how many stored signs have exactly that set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub glyphs: Vec<GlyphId>,
    pub weight: u64,
}

/// Sign-level glyph counts.
///
/// Besides per-glyph and pairwise counts the model keeps the weighted glyph
/// sets themselves, so the support of any glyph set can be answered exactly.
#[derive(Clone, Debug)]
pub struct CooccurrenceModel {
    granularity: Granularity,
    total_signs: u64,
    contains: BTreeMap<GlyphId, u64>,
    joint: BTreeMap<(GlyphId, GlyphId), u64>,
    signatures: Vec<Signature>,
    postings: HashMap<GlyphId, Vec<u32>>,
}

impl PartialEq for CooccurrenceModel {
    fn eq(&self, other: &Self) -> bool {
        self.granularity == other.granularity
            && self.total_signs == other.total_signs
            && self.contains == other.contains
            && self.joint == other.joint
            && self.signatures == other.signatures
    }
}

impl Eq for CooccurrenceModel {}

fn ordered(a: GlyphId, b: GlyphId) -> (GlyphId, GlyphId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl CooccurrenceModel {
    /// Builds a model from weighted glyph sets. Sets are re-keyed to
    /// `granularity` and merged.
    pub fn from_glyph_sets<I>(granularity: Granularity, sets: I) -> Self
    where
        I: IntoIterator<Item = (Vec<GlyphId>, u64)>,
    {
        let mut merged: BTreeMap<Vec<GlyphId>, u64> = BTreeMap::new();
        for (glyphs, weight) in sets {
            if weight == 0 {
                continue;
            }
            let mut keys: Vec<GlyphId> = glyphs.into_iter().map(|g| granularity.key(g)).collect();
            keys.sort();
            keys.dedup();
            if keys.is_empty() {
                continue;
            }
            *merged.entry(keys).or_insert(0) += weight;
        }
        let signatures = merged
            .into_iter()
            .map(|(glyphs, weight)| Signature { glyphs, weight })
            .collect();
        Self::from_signatures(granularity, signatures)
    }

    fn from_signatures(granularity: Granularity, signatures: Vec<Signature>) -> Self {
        let mut contains = BTreeMap::new();
        let mut joint = BTreeMap::new();
        let mut postings: HashMap<GlyphId, Vec<u32>> = HashMap::new();
        let mut total_signs = 0;
        for (i, sig) in signatures.iter().enumerate() {
            total_signs += sig.weight;
            for (a_idx, &a) in sig.glyphs.iter().enumerate() {
                *contains.entry(a).or_insert(0) += sig.weight;
                postings.entry(a).or_default().push(i as u32);
                for &b in &sig.glyphs[a_idx + 1..] {
                    *joint.entry(ordered(a, b)).or_insert(0) += sig.weight;
                }
            }
        }
        Self {
            granularity,
            total_signs,
            contains,
            joint,
            signatures,
            postings,
        }
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn total_signs(&self) -> u64 {
        self.total_signs
    }

    pub fn is_empty(&self) -> bool {
        self.total_signs == 0
    }

    /// Map a glyph to the key used by this model.
    pub fn key(&self, glyph: GlyphId) -> GlyphId {
        self.granularity.key(glyph)
    }

    pub fn contains(&self, glyph: &GlyphId) -> u64 {
        self.contains.get(glyph).copied().unwrap_or(0)
    }

    pub fn contains_map(&self) -> &BTreeMap<GlyphId, u64> {
        &self.contains
    }

    /// Signs containing both glyphs; symmetric. `joint(g, g)` is
    /// `contains(g)`.
    pub fn joint(&self, a: &GlyphId, b: &GlyphId) -> u64 {
        if a == b {
            return self.contains(a);
        }
        self.joint.get(&ordered(*a, *b)).copied().unwrap_or(0)
    }

    /// Pairs `(a, b)` with `a < b` and their joint count.
    pub fn joint_map(&self) -> &BTreeMap<(GlyphId, GlyphId), u64> {
        &self.joint
    }

    pub fn signatures(&self) -> &[Signature] {
        &self.signatures
    }

    /// Indices of signatures containing every key in `set`; `None` means
    /// "all signatures" (empty set).
    pub(crate) fn matching_signatures(&self, set: &[GlyphId]) -> Option<Vec<u32>> {
        let mut lists: Vec<&Vec<u32>> = Vec::with_capacity(set.len());
        for g in set {
            match self.postings.get(g) {
                Some(list) => lists.push(list),
                None => return Some(Vec::new()),
            }
        }
        if lists.is_empty() {
            return None;
        }
        lists.sort_by_key(|l| l.len());
        let mut acc: Vec<u32> = lists[0].clone();
        for list in &lists[1..] {
            acc = intersect_sorted(&acc, list);
            if acc.is_empty() {
                break;
            }
        }
        Some(acc)
    }

    /// Number of signs containing every glyph of `set` (already keyed).
    pub fn support(&self, set: &[GlyphId]) -> u64 {
        match self.matching_signatures(set) {
            None => self.total_signs,
            Some(idx) => idx.iter().map(|&i| self.signatures[i as usize].weight).sum(),
        }
    }

    /// Checks symmetry/bounds and that stored counts match the signatures.
    pub fn verify(&self) -> Result<(), String> {
        for sig in &self.signatures {
            if sig.weight == 0 || sig.glyphs.is_empty() || sig.glyphs.windows(2).any(|w| w[0] >= w[1]) {
                return Err("glyph set not sorted, empty or unweighted".into());
            }
        }
        let rebuilt = Self::from_signatures(self.granularity, self.signatures.clone());
        if rebuilt != *self {
            return Err("counts disagree with stored glyph sets".into());
        }
        for (&(a, b), &n) in &self.joint {
            if a >= b {
                return Err(format!("pair ({a}, {b}) not in canonical order"));
            }
            if n > self.contains(&a).min(self.contains(&b)) {
                return Err(format!("joint({a}, {b}) exceeds a marginal"));
            }
        }
        if self.contains.values().any(|&c| c > self.total_signs) {
            return Err("marginal exceeds total".into());
        }
        Ok(())
    }

    pub fn persist(&self, sink: &mut impl Write) -> Result<(), CorpusError> {
        let payload = serde_json::to_string(&Payload::from(self)).expect("model serializes");
        let digest = hex::encode(Sha256::digest(payload.as_bytes()));
        write!(sink, "{MODEL_MAGIC} {MODEL_VERSION}\nsha256:{digest}\n{payload}\n")
            .map_err(|source| CorpusError::Io {
                path: "<model sink>".into(),
                source,
            })
    }

    pub fn load(source: &mut impl Read) -> Result<Self, CorpusError> {
        let mut text = String::new();
        source.read_to_string(&mut text).map_err(|source| CorpusError::Io {
            path: "<model source>".into(),
            source,
        })?;
        let corrupt = |m: &str| CorpusError::CorruptModel(m.to_string());
        let mut lines = text.splitn(3, '\n');
        let header = lines.next().unwrap_or_default();
        let (magic, version) = header
            .split_once(' ')
            .ok_or_else(|| corrupt("missing header"))?;
        if magic != MODEL_MAGIC {
            return Err(corrupt("not a model snapshot"));
        }
        let version: u32 = version.trim().parse().map_err(|_| corrupt("bad version"))?;
        if version != MODEL_VERSION {
            return Err(CorpusError::VersionMismatch {
                found: version,
                expected: MODEL_VERSION,
            });
        }
        let digest = lines
            .next()
            .and_then(|l| l.strip_prefix("sha256:"))
            .ok_or_else(|| corrupt("missing checksum"))?;
        let payload = lines.next().ok_or_else(|| corrupt("missing payload"))?;
        let payload = payload.strip_suffix('\n').unwrap_or(payload);
        if hex::encode(Sha256::digest(payload.as_bytes())) != digest {
            return Err(corrupt("checksum mismatch"));
        }
        let payload: Payload = serde_json::from_str(payload).map_err(|e| corrupt(&e.to_string()))?;
        let model = payload.into_model();
        model.verify().map_err(|m| corrupt(&m))?;
        Ok(model)
    }
}

/// Builds the model for the store's current content.
pub fn build_model(store: &CorpusStore, granularity: Granularity) -> CooccurrenceModel {
    CooccurrenceModel::from_glyph_sets(granularity, store.glyph_sets(granularity))
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct Payload {
    granularity: Granularity,
    total_signs: u64,
    contains: Vec<(GlyphId, u64)>,
    joint: Vec<(GlyphId, GlyphId, u64)>,
    signatures: Vec<(Vec<GlyphId>, u64)>,
}

impl From<&CooccurrenceModel> for Payload {
    fn from(m: &CooccurrenceModel) -> Self {
        Payload {
            granularity: m.granularity,
            total_signs: m.total_signs,
            contains: m.contains.iter().map(|(k, v)| (*k, *v)).collect(),
            joint: m.joint.iter().map(|((a, b), n)| (*a, *b, *n)).collect(),
            signatures: m
                .signatures
                .iter()
                .map(|s| (s.glyphs.clone(), s.weight))
                .collect(),
        }
    }
}

impl Payload {
    fn into_model(self) -> CooccurrenceModel {
        let signatures: Vec<Signature> = self
            .signatures
            .into_iter()
            .map(|(glyphs, weight)| Signature { glyphs, weight })
            .collect();
        let mut model = CooccurrenceModel::from_signatures(self.granularity, signatures);
        // keep what the file claims so verify() can compare
        model.total_signs = self.total_signs;
        model.contains = self.contains.into_iter().collect();
        model.joint = self.joint.into_iter().map(|(a, b, n)| ((a, b), n)).collect();
        model
    }
}
