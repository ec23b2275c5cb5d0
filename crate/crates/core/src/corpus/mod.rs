//! Structured corpus storage and glyph co-occurrence statistics.

mod model;
mod patterns;
mod store;

pub use model::{build_model, CooccurrenceModel, Signature, MODEL_MAGIC, MODEL_VERSION};
pub use patterns::{pattern_report, Pattern};
pub use store::{
    CorpusEntry, CorpusStore, IngestItem, Provenance, ReviewStatus, CORPUS_FORMAT, CORPUS_VERSION,
};

use serde::{Deserialize, Serialize};

use crate::iswa::GlyphId;

/// How glyph ids are keyed in statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Granularity {
    /// Exact 13-digit ids.
    FullId,
    /// Variation, fill and rotation pooled (see [`GlyphId::base_key`]).
    #[default]
    BaseLevel,
}

impl Granularity {
    pub fn key(self, glyph: GlyphId) -> GlyphId {
        match self {
            Granularity::FullId => glyph,
            Granularity::BaseLevel => glyph.base_key(),
        }
    }
}

impl std::str::FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" | "full-id" => Ok(Granularity::FullId),
            "base" | "base-level" => Ok(Granularity::BaseLevel),
            other => Err(format!("unknown granularity {other:?} (expected full-id or base-level)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("glyph {0} is not in the catalog")]
    UnknownGlyph(GlyphId),
    #[error("sign {0:?} has no glyphs")]
    EmptySign(String),
    #[error("invalid sign: {0}")]
    InvalidSign(String),
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupt model snapshot: {0}")]
    CorruptModel(String),
    #[error("corrupt corpus file at line {line}: {reason}")]
    CorruptCorpus { line: usize, reason: String },
    #[error("minimum support must be at least 1")]
    InvalidMinSupport,
}
