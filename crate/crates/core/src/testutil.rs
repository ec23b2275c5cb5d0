//! Shared fixtures for unit tests.

use crate::iswa::{Catalog, GlyphId};
use crate::raster::BinaryImage;
use crate::swml::{GlyphPlacement, Sign};

/// Three hand glyphs A < B < C, each a solid 10x10 square, plus one
/// movement glyph M.
pub fn toy_catalog() -> Catalog {
    let manifest = "@manifest version=toy count=4\n\
        @region hand body 1\n@region movement aspect 2\n\
        01-01-001-01-01-01\tA\thand\tfamily=a\tx\n\
        01-01-002-01-01-01\tB\thand\tfamily=b\tx\n\
        01-01-003-01-01-01\tC\thand\tfamily=c\tx\n\
        02-01-001-01-01-01\tM\tmovement\t-\tx\n";
    Catalog::from_manifest(manifest, |_| Ok(Some(BinaryImage::from_fn(10, 10, |_, _| true)))).unwrap()
}

pub fn a() -> GlyphId {
    "01-01-001-01-01-01".parse().unwrap()
}
pub fn b() -> GlyphId {
    "01-01-002-01-01-01".parse().unwrap()
}
pub fn c() -> GlyphId {
    "01-01-003-01-01-01".parse().unwrap()
}

/// Glyphs laid out left to right, 20 px apart.
pub fn sign_of(id: &str, glyphs: &[GlyphId]) -> Sign {
    Sign::new(
        id,
        glyphs
            .iter()
            .enumerate()
            .map(|(i, g)| GlyphPlacement::new(*g, 20 * i as u32, 0))
            .collect(),
    )
}

/// S1 = {A, B}, S2 = {A, B, C}, S3 = {A, C}.
pub fn toy_signs() -> Vec<Sign> {
    vec![
        sign_of("s1", &[a(), b()]),
        sign_of("s2", &[a(), b(), c()]),
        sign_of("s3", &[a(), c()]),
    ]
}
