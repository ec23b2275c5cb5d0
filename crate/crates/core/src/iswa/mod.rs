//! The International SignWriting Alphabet: codes, catalog, anatomic
//! navigation and choice-box filtering.

mod catalog;
mod code;
mod region;

pub use catalog::{
    load_catalog, Catalog, CatalogError, CategorySummary, ChoiceBoxSpec, FilterState,
    GlyphDescriptor,
};
pub use code::{format_glyph_id, parse_glyph_id, CodeError, GlyphId, CATEGORY_COUNT};
pub use region::{AnatomicRegion, RegionKind, Scope};
