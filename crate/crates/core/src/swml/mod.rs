//! SWML documents: signs as coordinate-placed glyph lists, documents as
//! vertical columns of signs.

mod layout;
mod model;
mod xml;

pub use layout::{compute_bbox, layout_column, normalize_sign, ColumnSlot};
pub use model::{Column, DocumentMeta, GlyphPlacement, Sign, SignDocument, SignSource, SIGN_SPACE};
pub use xml::{parse_swml, serialize_swml, SWML_VERSION};

use crate::iswa::{CodeError, GlyphId};

#[derive(Debug, thiserror::Error)]
pub enum SwmlError {
    #[error("malformed SWML: {0}")]
    MalformedDocument(String),
    #[error("SWML schema violation: {0}")]
    SchemaViolation(String),
    #[error("bad glyph code {code:?}: {source}")]
    BadCode {
        code: String,
        #[source]
        source: CodeError,
    },
    #[error("bad coordinate {attribute}={value:?}")]
    BadCoordinate { attribute: String, value: String },
    #[error("document invariant violated: {0}")]
    InvariantViolation(String),
    #[error("glyph {0} is not in the catalog")]
    UnknownGlyph(GlyphId),
}
