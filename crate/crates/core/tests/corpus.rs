use std::collections::BTreeMap;
use std::path::PathBuf;

use proptest::prelude::*;
use sword_core::corpus::{build_model, pattern_report, CooccurrenceModel, CorpusError, CorpusStore, Granularity, ReviewStatus};
use sword_core::iswa::{load_catalog, GlyphId};
use sword_core::swml::{parse_swml, SignSource};

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn id(s: &str) -> GlyphId {
    s.parse().unwrap()
}

#[test]
fn toy_corpus_survives_reopen() {
    let catalog = load_catalog(&data("sample-catalog/manifest.txt")).unwrap();
    let doc = parse_swml(&std::fs::read(data("toy/toy-signs.swml")).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("corpus.jsonl");
    {
        let mut store = CorpusStore::open(&log).unwrap();
        assert_eq!(store.ingest(&catalog, &doc, SignSource::Import, ReviewStatus::Reviewed).unwrap().len(), 3);
    }
    let store = CorpusStore::open(&log).unwrap();
    assert_eq!(store.total_signs(), 3);
    let (a, b, c) = (id("01-01-001-01-01-01"), id("02-03-001-01-01-01"), id("04-01-001-01-01-01"));
    let model = build_model(&store, Granularity::FullId);
    assert_eq!((model.contains(&a), model.contains(&b), model.contains(&c)), (3, 2, 2));
    assert_eq!((model.joint(&a, &b), model.joint(&a, &c), model.joint(&b, &c)), (2, 2, 1));
    assert_eq!(model.total_signs(), 3);

    let mut snapshot = Vec::new();
    model.persist(&mut snapshot).unwrap();
    assert_eq!(CooccurrenceModel::load(&mut snapshot.as_slice()).unwrap(), model);
    let tampered = String::from_utf8(snapshot).unwrap().replace("\"total_signs\":3", "\"total_signs\":4");
    assert!(matches!(CooccurrenceModel::load(&mut tampered.as_bytes()), Err(CorpusError::CorruptModel(_))));

    let patterns = pattern_report(&model, 2).unwrap();
    let got: Vec<(Vec<GlyphId>, u64)> = patterns.into_iter().map(|p| (p.glyphs, p.support)).collect();
    assert_eq!(got, [(vec![a, b], 2), (vec![a, c], 2)]);
}

#[test]
fn unknown_glyphs_are_rejected_atomically() {
    let catalog = load_catalog(&data("sample-catalog/manifest.txt")).unwrap();
    let doc = parse_swml(
        b"<swml version=\"1.0\"><doc-meta/><column>\
          <sign id=\"ok\"><glyph code=\"01-01-001-01-01-01\" x=\"0\" y=\"0\"/></sign>\
          <sign id=\"bad\"><glyph code=\"01-01-999-01-01-01\" x=\"0\" y=\"0\"/></sign>\
          </column></swml>",
    )
    .unwrap();
    let mut store = CorpusStore::in_memory();
    assert!(matches!(
        store.ingest(&catalog, &doc, SignSource::Editor, ReviewStatus::Raw),
        Err(CorpusError::UnknownGlyph(_))
    ));
    assert!(store.is_empty());
}

fn glyph_pool() -> Vec<GlyphId> {
    (1..=12u16).map(|b| GlyphId::new(1 + (b % 3) as u8, 1, b, 1, 1, 1 + (b % 2) as u8).unwrap()).collect()
}

fn corpus_strategy() -> impl Strategy<Value = Vec<Vec<GlyphId>>> {
    let pool = glyph_pool();
    prop::collection::vec(prop::collection::vec(prop::sample::select(pool), 1..5), 0..40)
}

proptest! {
    #[test]
    fn model_matches_brute_force_recount(signs in corpus_strategy(), full in any::<bool>()) {
        let granularity = if full { Granularity::FullId } else { Granularity::BaseLevel };
        let model = CooccurrenceModel::from_glyph_sets(granularity, signs.iter().map(|s| (s.clone(), 1)));
        let keyed: Vec<Vec<GlyphId>> = signs
            .iter()
            .map(|s| {
                let mut k: Vec<GlyphId> = s.iter().map(|g| granularity.key(*g)).collect();
                k.sort();
                k.dedup();
                k
            })
            .collect();
        let mut contains: BTreeMap<GlyphId, u64> = BTreeMap::new();
        for s in &keyed {
            for g in s {
                *contains.entry(*g).or_default() += 1;
            }
        }
        prop_assert_eq!(model.total_signs(), signs.len() as u64);
        prop_assert_eq!(model.contains_map(), &contains);
        for a in contains.keys() {
            for b in contains.keys() {
                if a == b {
                    continue;
                }
                let joint = keyed.iter().filter(|s| s.contains(a) && s.contains(b)).count() as u64;
                prop_assert_eq!(model.joint(a, b), joint);
                prop_assert_eq!(model.joint(a, b), model.joint(b, a));
                prop_assert!(joint <= contains[a].min(contains[b]));
            }
        }
    }
}
