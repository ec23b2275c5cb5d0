//! Frequent glyph sets, grown level by level (Apriori).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::model::CooccurrenceModel;
use super::CorpusError;
use crate::iswa::GlyphId;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub glyphs: Vec<GlyphId>,
    pub support: u64,
}

/// Every glyph set of size >= 2 contained in at least `min_support` signs,
/// sorted by support (desc), size (desc), then codes.
pub fn pattern_report(model: &CooccurrenceModel, min_support: u64) -> Result<Vec<Pattern>, CorpusError> {
    if min_support == 0 {
        return Err(CorpusError::InvalidMinSupport);
    }
    let mut level: Vec<Vec<GlyphId>> = model
        .contains_map()
        .iter()
        .filter(|(_, &n)| n >= min_support)
        .map(|(g, _)| vec![*g])
        .collect();
    let mut found = Vec::new();

    while !level.is_empty() {
        let frequent: BTreeSet<&Vec<GlyphId>> = level.iter().collect();
        let mut next = Vec::new();
        // level is sorted, so sets sharing a prefix are adjacent
        let mut by_prefix: BTreeMap<&[GlyphId], Vec<GlyphId>> = BTreeMap::new();
        for set in &level {
            let (last, prefix) = set.split_last().expect("non-empty");
            by_prefix.entry(prefix).or_default().push(*last);
        }
        for (prefix, tails) in by_prefix {
            for (i, a) in tails.iter().enumerate() {
                for b in &tails[i + 1..] {
                    let mut candidate = prefix.to_vec();
                    candidate.push(*a);
                    candidate.push(*b);
                    // every (k-1)-subset must be frequent
                    let all_frequent = (0..candidate.len()).all(|skip| {
                        let subset: Vec<GlyphId> = candidate
                            .iter()
                            .enumerate()
                            .filter(|(j, _)| *j != skip)
                            .map(|(_, g)| *g)
                            .collect();
                        frequent.contains(&subset)
                    });
                    if !all_frequent {
                        continue;
                    }
                    let support = model.support(&candidate);
                    if support >= min_support {
                        found.push(Pattern {
                            glyphs: candidate.clone(),
                            support,
                        });
                        next.push(candidate);
                    }
                }
            }
        }
        next.sort();
        level = next;
    }

    found.sort_by(|a, b| {
        b.support
            .cmp(&a.support)
            .then(b.glyphs.len().cmp(&a.glyphs.len()))
            .then_with(|| a.glyphs.cmp(&b.glyphs))
    });
    Ok(found)
}
