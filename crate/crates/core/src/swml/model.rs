use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SwmlError;
use crate::iswa::GlyphId;

/// Sign-space coordinates live in `[0, SIGN_SPACE)` on both axes.
pub const SIGN_SPACE: u32 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GlyphPlacement {
    pub glyph: GlyphId,
    pub x: u32,
    pub y: u32,
    #[serde(default)]
    pub z: u32,
}

impl GlyphPlacement {
    pub fn new(glyph: GlyphId, x: u32, y: u32) -> Self {
        Self { glyph, x, y, z: 0 }
    }

    pub fn with_z(mut self, z: u32) -> Self {
        self.z = z;
        self
    }

    /// Key of the canonical placement order.
    pub fn draw_key(&self) -> (u32, u32, u32, GlyphId) {
        (self.z, self.y, self.x, self.glyph)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignSource {
    #[default]
    Editor,
    Ogr,
    Import,
}

impl SignSource {
    pub fn as_str(self) -> &'static str {
        match self {
            SignSource::Editor => "editor",
            SignSource::Ogr => "ogr",
            SignSource::Import => "import",
        }
    }
}

impl fmt::Display for SignSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SignSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "editor" => Ok(SignSource::Editor),
            "ogr" => Ok(SignSource::Ogr),
            "import" => Ok(SignSource::Import),
            other => Err(format!("unknown sign source {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sign {
    pub sign_id: String,
    pub placements: Vec<GlyphPlacement>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gloss_labels: Vec<String>,
    #[serde(default)]
    pub source: SignSource,
}

impl Sign {
    pub fn new(sign_id: impl Into<String>, placements: Vec<GlyphPlacement>) -> Self {
        Self {
            sign_id: sign_id.into(),
            placements,
            gloss_labels: Vec::new(),
            source: SignSource::Editor,
        }
    }

    pub fn with_source(mut self, source: SignSource) -> Self {
        self.source = source;
        self
    }

    /// Placements in draw order `(z, y, x, code)`.
    pub fn canonical(&self) -> Sign {
        let mut sign = self.clone();
        sign.placements.sort_by_key(GlyphPlacement::draw_key);
        sign
    }

    /// Distinct glyphs, ascending.
    pub fn glyph_set(&self) -> Vec<GlyphId> {
        let mut ids: Vec<GlyphId> = self.placements.iter().map(|p| p.glyph).collect();
        ids.sort();
        ids.dedup();
        ids
    }

    pub fn check(&self) -> Result<(), SwmlError> {
        let violation = |m: String| Err(SwmlError::InvariantViolation(m));
        if self.sign_id.is_empty() {
            return violation("empty sign id".into());
        }
        check_xml_text(&self.sign_id)?;
        if self.placements.is_empty() {
            return violation(format!("sign {} has no glyphs", self.sign_id));
        }
        let mut seen = HashSet::new();
        for p in &self.placements {
            if p.x >= SIGN_SPACE || p.y >= SIGN_SPACE {
                return violation(format!(
                    "sign {}: placement ({}, {}) outside sign space",
                    self.sign_id, p.x, p.y
                ));
            }
            if !seen.insert((p.glyph, p.x, p.y)) {
                return violation(format!(
                    "sign {}: glyph {} placed twice at ({}, {})",
                    self.sign_id, p.glyph, p.x, p.y
                ));
            }
        }
        for g in &self.gloss_labels {
            check_xml_text(g)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DocumentMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    /// Sign-language tag, e.g. `ase` or `ise`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modified: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Column {
    pub signs: Vec<Sign>,
}

/// Signs laid out in vertical columns, read in column order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignDocument {
    pub meta: DocumentMeta,
    pub columns: Vec<Column>,
}

impl SignDocument {
    pub fn signs(&self) -> impl Iterator<Item = &Sign> {
        self.columns.iter().flat_map(|c| c.signs.iter())
    }

    pub fn sign_count(&self) -> usize {
        self.columns.iter().map(|c| c.signs.len()).sum()
    }

    /// Same document with every sign's placements in draw order.
    pub fn canonical(&self) -> SignDocument {
        SignDocument {
            meta: self.meta.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| Column {
                    signs: c.signs.iter().map(Sign::canonical).collect(),
                })
                .collect(),
        }
    }

    /// Equality up to placement order inside signs.
    pub fn structurally_eq(&self, other: &SignDocument) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn check(&self) -> Result<(), SwmlError> {
        let m = &self.meta;
        for v in [&m.title, &m.language, &m.author, &m.created, &m.modified]
            .into_iter()
            .flatten()
        {
            check_xml_text(v)?;
        }
        let mut ids = HashSet::new();
        for (i, column) in self.columns.iter().enumerate() {
            if column.signs.is_empty() {
                return Err(SwmlError::InvariantViolation(format!("column {i} is empty")));
            }
            for sign in &column.signs {
                sign.check()?;
                if !ids.insert(sign.sign_id.as_str()) {
                    return Err(SwmlError::InvariantViolation(format!(
                        "duplicate sign id {:?}",
                        sign.sign_id
                    )));
                }
            }
        }
        Ok(())
    }
}

/// XML 1.0 cannot carry most control characters, even escaped.
fn check_xml_text(s: &str) -> Result<(), SwmlError> {
    match s
        .chars()
        .find(|c| matches!(*c, '\u{0}'..='\u{8}' | '\u{b}' | '\u{c}' | '\u{e}'..='\u{1f}' | '\u{fffe}' | '\u{ffff}'))
    {
        Some(c) => Err(SwmlError::InvariantViolation(format!(
            "character U+{:04X} cannot be stored in SWML",
            c as u32
        ))),
        None => Ok(()),
    }
}
