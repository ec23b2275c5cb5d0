//! Fixtures shared by the benchmarks.

use std::path::PathBuf;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sword_core::corpus::{build_model, CooccurrenceModel, CorpusStore, Granularity, ReviewStatus};
use sword_core::iswa::{load_catalog, GlyphId};
use sword_core::swml::{GlyphPlacement, Sign, SignSource};
use sword_core::Catalog;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn sample_catalog() -> Catalog {
    load_catalog(&data_dir().join("sample-catalog/manifest.txt")).expect("sample catalog loads")
}

/// A corpus of `signs` random signs of 1-5 glyphs drawn from the catalog.
pub fn random_model(catalog: &Catalog, signs: usize, seed: u64) -> CooccurrenceModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<GlyphId> = catalog.ids().collect();
    let mut store = CorpusStore::in_memory();
    for n in 0..signs {
        let placements = (0..rng.random_range(1..=5))
            .map(|i| GlyphPlacement::new(*ids.choose(&mut rng).unwrap(), i * 30, rng.random_range(0..100)))
            .collect();
        store
            .ingest(catalog, &Sign::new(format!("b{n}"), placements), SignSource::Import, ReviewStatus::Raw)
            .expect("catalog glyphs ingest");
    }
    build_model(&store, Granularity::BaseLevel)
}
