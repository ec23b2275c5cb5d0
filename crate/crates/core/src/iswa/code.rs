//! ISWA glyph codes.
//!
//! A code is 13 digits written as six dash-separated fields
//! `CC-GG-BBB-VV-FF-RR`: category, group, base symbol, variation, fill and
//! rotation. Every field is strictly positive and the category is at most 7.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Number of top-level ISWA categories.
pub const CATEGORY_COUNT: u8 = 7;

const FIELD_WIDTHS: [usize; 6] = [2, 2, 3, 2, 2, 2];
const CANONICAL_LEN: usize = 18;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodeError {
    #[error("malformed glyph code {text:?}: {reason}")]
    MalformedCode { text: String, reason: &'static str },
    #[error("glyph code {text:?}: {field} {value} out of range")]
    FieldOutOfRange {
        text: String,
        field: &'static str,
        value: u32,
    },
}

/// Identifies one glyph of the ISWA.
///
/// The derived ordering follows the field order, which is also the
/// lexicographic order of the canonical text form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlyphId {
    pub category: u8,
    pub group: u8,
    pub base: u16,
    pub variation: u8,
    pub fill: u8,
    pub rotation: u8,
}

impl GlyphId {
    /// Builds an id, checking field ranges.
    pub fn new(
        category: u8,
        group: u8,
        base: u16,
        variation: u8,
        fill: u8,
        rotation: u8,
    ) -> Result<Self, CodeError> {
        let id = Self {
            category,
            group,
            base,
            variation,
            fill,
            rotation,
        };
        id.validate(&id.to_string())?;
        Ok(id)
    }

    fn validate(&self, text: &str) -> Result<(), CodeError> {
        let checks: [(&'static str, u32, u32); 6] = [
            ("category", self.category as u32, CATEGORY_COUNT as u32),
            ("group", self.group as u32, 99),
            ("base", self.base as u32, 999),
            ("variation", self.variation as u32, 99),
            ("fill", self.fill as u32, 99),
            ("rotation", self.rotation as u32, 99),
        ];
        for (field, value, max) in checks {
            if value == 0 || value > max {
                return Err(CodeError::FieldOutOfRange {
                    text: text.to_string(),
                    field,
                    value,
                });
            }
        }
        Ok(())
    }

    /// The id with variation, fill and rotation reset to 1. Used as the
    /// pooling key for base-level statistics.
    pub fn base_key(&self) -> GlyphId {
        GlyphId {
            variation: 1,
            fill: 1,
            rotation: 1,
            ..*self
        }
    }

    pub fn parse(text: &str) -> Result<Self, CodeError> {
        let malformed = |reason| CodeError::MalformedCode {
            text: text.to_string(),
            reason,
        };
        if !text.is_ascii() {
            return Err(malformed("non-ascii characters"));
        }
        let parts: Vec<&str> = text.split('-').collect();
        if parts.len() != FIELD_WIDTHS.len() {
            return Err(malformed("expected 6 dash-separated fields"));
        }
        if text.len() != CANONICAL_LEN {
            return Err(malformed("expected 13 digits"));
        }
        let mut values = [0u32; 6];
        for (i, (part, width)) in parts.iter().zip(FIELD_WIDTHS).enumerate() {
            if part.len() != width {
                return Err(malformed("field width mismatch"));
            }
            if !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed("non-digit character"));
            }
            values[i] = part.parse().expect("digits only");
        }
        let id = GlyphId {
            category: values[0] as u8,
            group: values[1] as u8,
            base: values[2] as u16,
            variation: values[3] as u8,
            fill: values[4] as u8,
            rotation: values[5] as u8,
        };
        id.validate(text)?;
        Ok(id)
    }
}

/// Parses a canonical code.
pub fn parse_glyph_id(text: &str) -> Result<GlyphId, CodeError> {
    GlyphId::parse(text)
}

/// Canonical 13-digit dashed form.
pub fn format_glyph_id(id: &GlyphId) -> String {
    id.to_string()
}

impl fmt::Display for GlyphId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:02}-{:02}-{:03}-{:02}-{:02}-{:02}",
            self.category, self.group, self.base, self.variation, self.fill, self.rotation
        )
    }
}

impl FromStr for GlyphId {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GlyphId::parse(s)
    }
}

impl Serialize for GlyphId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GlyphId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        GlyphId::parse(&s).map_err(serde::de::Error::custom)
    }
}
