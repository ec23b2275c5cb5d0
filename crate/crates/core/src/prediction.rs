//! Hint-panel suggestions: rank glyphs by how often they co-occur with the
//! glyphs already placed in the sign under composition.
//!
//! Scores are exact rationals. With `S` the placed keys:
//!
//! * exact tier: `support(S ∪ {g}) / support(S)` when `support(S) > 0`;
//! * pairwise back-off: mean over `s ∈ S` of `joint(s, g) / contains(s)`
//!   (a term is 0 when `s` never occurs);
//! * frequency back-off: `contains(g) / total_signs`, used when nothing is
//!   placed or both tiers above come out empty.
//!
//! Ties are broken by `contains(g)` (desc) then by code.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::corpus::CooccurrenceModel;
use crate::iswa::GlyphId;
use crate::swml::GlyphPlacement;

pub const DEFAULT_K: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PredictionError {
    #[error("the co-occurrence model holds no signs")]
    EmptyModel,
    #[error("k must be at least 1")]
    InvalidK,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    Exact,
    BackoffPairwise,
    BackoffFrequency,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Suggestion {
    pub glyph: GlyphId,
    pub score: BigRational,
    pub tier: Tier,
}

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Ranked suggestions for the placed glyphs, at most `k` of them.
pub fn suggest(
    placed: &[GlyphId],
    model: &CooccurrenceModel,
    k: usize,
) -> Result<Vec<Suggestion>, PredictionError> {
    if k == 0 {
        return Err(PredictionError::InvalidK);
    }
    if model.is_empty() {
        return Err(PredictionError::EmptyModel);
    }
    let set: BTreeSet<GlyphId> = placed.iter().map(|g| model.key(*g)).collect();
    let set: Vec<GlyphId> = set.into_iter().collect();

    let mut scored = Vec::new();
    let mut tier = Tier::BackoffFrequency;
    if !set.is_empty() {
        scored = exact_tier(&set, model);
        tier = Tier::Exact;
        if scored.is_empty() {
            scored = pairwise_tier(&set, model);
            tier = Tier::BackoffPairwise;
        }
    }
    if scored.is_empty() {
        tier = Tier::BackoffFrequency;
        let total = model.total_signs();
        scored = model
            .contains_map()
            .iter()
            .filter(|(g, _)| set.binary_search(g).is_err())
            .map(|(g, &n)| (*g, ratio(n, total)))
            .collect();
    }

    scored.sort_by(|(ga, sa), (gb, sb)| {
        sb.cmp(sa)
            .then_with(|| model.contains(gb).cmp(&model.contains(ga)))
            .then_with(|| ga.cmp(gb))
    });
    scored.truncate(k);
    Ok(scored
        .into_iter()
        .map(|(glyph, score)| Suggestion { glyph, score, tier })
        .collect())
}

fn exact_tier(set: &[GlyphId], model: &CooccurrenceModel) -> Vec<(GlyphId, BigRational)> {
    let matching = model.matching_signatures(set).unwrap_or_default();
    let support: u64 = matching
        .iter()
        .map(|&i| model.signatures()[i as usize].weight)
        .sum();
    if support == 0 {
        return Vec::new();
    }
    let mut counts: BTreeMap<GlyphId, u64> = BTreeMap::new();
    for &i in &matching {
        let sig = &model.signatures()[i as usize];
        for g in &sig.glyphs {
            if set.binary_search(g).is_err() {
                *counts.entry(*g).or_insert(0) += sig.weight;
            }
        }
    }
    counts
        .into_iter()
        .map(|(g, n)| (g, ratio(n, support)))
        .collect()
}

fn pairwise_tier(set: &[GlyphId], model: &CooccurrenceModel) -> Vec<(GlyphId, BigRational)> {
    let mut sums: BTreeMap<GlyphId, BigRational> = BTreeMap::new();
    for s in set {
        let marginal = model.contains(s);
        if marginal == 0 {
            continue;
        }
        let mut partners: BTreeMap<GlyphId, u64> = BTreeMap::new();
        for &i in &model.matching_signatures(std::slice::from_ref(s)).unwrap_or_default() {
            let sig = &model.signatures()[i as usize];
            for g in &sig.glyphs {
                if set.binary_search(g).is_err() {
                    *partners.entry(*g).or_insert(0) += sig.weight;
                }
            }
        }
        for (g, joint) in partners {
            *sums.entry(g).or_insert_with(BigRational::zero) += ratio(joint, marginal);
        }
    }
    let n = BigRational::from_integer(BigInt::from(set.len()));
    sums.into_iter().map(|(g, sum)| (g, sum / &n)).collect()
}

#[derive(Serialize)]
struct SuggestionJson {
    code: String,
    score: String,
    score_value: f64,
    tier: Tier,
}

#[derive(Serialize)]
struct SuggestionsJson {
    suggestions: Vec<SuggestionJson>,
}

/// Canonical JSON form shared by the CLI and the HTTP service. Scores are
/// written as `num/den` strings plus a float for display.
pub fn suggestions_to_json(suggestions: &[Suggestion]) -> String {
    let body = SuggestionsJson {
        suggestions: suggestions
            .iter()
            .map(|s| SuggestionJson {
                code: s.glyph.to_string(),
                score: format!("{}/{}", s.score.numer(), s.score.denom()),
                score_value: s.score.to_f64().unwrap_or(f64::NAN),
                tier: s.tier,
            })
            .collect(),
    };
    serde_json::to_string(&body).expect("suggestions serialize")
}

/// The sign on the display while it is being composed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompositionSession {
    placements: Vec<GlyphPlacement>,
}

impl CompositionSession {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn place(&mut self, placement: GlyphPlacement) {
        self.placements.push(placement);
    }

    /// Removes the first placement equal to `placement`.
    pub fn remove(&mut self, placement: &GlyphPlacement) -> bool {
        match self.placements.iter().position(|p| p == placement) {
            Some(i) => {
                self.placements.remove(i);
                true
            }
            None => false,
        }
    }

    pub fn placements(&self) -> &[GlyphPlacement] {
        &self.placements
    }

    pub fn placed(&self) -> Vec<GlyphId> {
        let set: BTreeSet<GlyphId> = self.placements.iter().map(|p| p.glyph).collect();
        set.into_iter().collect()
    }
}

/// Suggestions for the session's current placed set.
pub fn refresh(
    session: &CompositionSession,
    model: &CooccurrenceModel,
    k: usize,
) -> Result<Vec<Suggestion>, PredictionError> {
    suggest(&session.placed(), model, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Granularity;
    use crate::testutil::{a, b, c};

    fn toy() -> CooccurrenceModel {
        CooccurrenceModel::from_glyph_sets(
            Granularity::FullId,
            [(vec![a(), b()], 1), (vec![a(), b(), c()], 1), (vec![a(), c()], 1)],
        )
    }

    fn pairs(s: &[Suggestion]) -> Vec<(GlyphId, BigRational)> {
        s.iter().map(|s| (s.glyph, s.score.clone())).collect()
    }

    #[test]
    fn nothing_placed_ranks_by_frequency() {
        let s = suggest(&[], &toy(), 12).unwrap();
        assert_eq!(pairs(&s), [(a(), ratio(1, 1)), (b(), ratio(2, 3)), (c(), ratio(2, 3))]);
        assert!(s.iter().all(|s| s.tier == Tier::BackoffFrequency));
    }

    #[test]
    fn one_placed_glyph_conditions_exactly() {
        let s = suggest(&[a()], &toy(), 12).unwrap();
        assert_eq!(pairs(&s), [(b(), ratio(2, 3)), (c(), ratio(2, 3))]);
        assert!(s.iter().all(|s| s.tier == Tier::Exact));
    }

    #[test]
    fn two_placed_glyphs_condition_jointly() {
        let s = suggest(&[b(), c()], &toy(), 12).unwrap();
        assert_eq!(pairs(&s), [(a(), ratio(1, 1))]);
    }

    #[test]
    fn unseen_glyph_falls_back_to_frequency() {
        let x: GlyphId = "03-01-001-01-01-01".parse().unwrap();
        let s = suggest(&[x], &toy(), 12).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|s| s.tier == Tier::BackoffFrequency));
    }

    #[test]
    fn pairwise_backoff_when_the_set_never_cooccurs() {
        let d: GlyphId = "02-01-001-01-01-01".parse().unwrap();
        let m = CooccurrenceModel::from_glyph_sets(
            Granularity::FullId,
            [(vec![a(), b()], 2), (vec![c(), d], 1), (vec![a()], 1)],
        );
        // {A, C} never appear together
        let s = suggest(&[a(), c()], &m, 12).unwrap();
        assert!(s.iter().all(|s| s.tier == Tier::BackoffPairwise));
        // B: (2/3 + 0) / 2 = 1/3, D: (0 + 1/1) / 2 = 1/2
        assert_eq!(pairs(&s), [(d, ratio(1, 2)), (b(), ratio(1, 3))]);
    }

    #[test]
    fn k_limits_and_validates() {
        assert_eq!(suggest(&[], &toy(), 1).unwrap().len(), 1);
        assert_eq!(suggest(&[], &toy(), 0), Err(PredictionError::InvalidK));
        let empty = CooccurrenceModel::from_glyph_sets(Granularity::FullId, []);
        assert_eq!(suggest(&[], &empty, 3), Err(PredictionError::EmptyModel));
    }

    #[test]
    fn session_refresh_is_pure() {
        let m = toy();
        let mut session = CompositionSession::new();
        let before = refresh(&session, &m, 12).unwrap();
        let p = GlyphPlacement::new(b(), 10, 10);
        session.place(p);
        let during = refresh(&session, &m, 12).unwrap();
        assert!(during.iter().all(|s| s.glyph != b()));
        assert_eq!(refresh(&session, &m, 12).unwrap(), during);
        assert!(session.remove(&p));
        assert_eq!(refresh(&session, &m, 12).unwrap(), before);
    }

    #[test]
    fn json_is_canonical() {
        let s = suggest(&[a()], &toy(), 12).unwrap();
        assert_eq!(
            suggestions_to_json(&s),
            r#"{"suggestions":[{"code":"01-01-002-01-01-01","score":"2/3","score_value":0.6666666666666666,"tier":"exact"},{"code":"01-01-003-01-01-01","score":"2/3","score_value":0.6666666666666666,"tier":"exact"}]}"#
        );
    }
}
