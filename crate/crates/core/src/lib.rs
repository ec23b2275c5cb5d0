//! SignWriting digitization engine: the ISWA glyph catalog, SWML sign
//! documents, a structured corpus with co-occurrence statistics, predictive
//! glyph suggestions, and optical glyph recognition for scanned pages.

pub mod corpus;
pub mod geometry;
pub mod iswa;
pub mod jobs;
pub mod ogr;
pub mod prediction;
pub mod raster;
pub mod swml;

#[cfg(test)]
pub(crate) mod testutil;

pub use geometry::BBox;
pub use iswa::{Catalog, GlyphId};
pub use swml::{Sign, SignDocument};
