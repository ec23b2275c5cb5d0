//! Human corrections applied to a recognition result.

use serde::{Deserialize, Serialize};

use super::pipeline::build_document;
use super::{OgrError, RecognitionResult, RecognizedGlyph};
use crate::geometry::BBox;
use crate::iswa::GlyphId;
use crate::swml::SignDocument;

/// Edits refer to recognized glyphs by `id` and to unresolved candidates by
/// their own `id`. New glyphs (add, split, resolve) get fresh ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum ReviewEdit {
    /// Keep the top guess as is.
    Accept { id: usize },
    Replace { id: usize, glyph: GlyphId },
    Delete { id: usize },
    Add { glyph: GlyphId, bbox: BBox },
    /// Several detections are really one glyph.
    Merge { ids: Vec<usize>, glyph: GlyphId },
    /// One detection is really several glyphs.
    Split { id: usize, parts: Vec<SplitPart> },
    /// Promote an unresolved candidate to a glyph.
    Resolve { candidate: usize, glyph: GlyphId },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitPart {
    pub glyph: GlyphId,
    pub bbox: BBox,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReviewOutcome {
    pub document: SignDocument,
    pub glyphs: Vec<RecognizedGlyph>,
    pub warnings: Vec<String>,
}

/// Applies `edits` in order, then re-segments with the configuration the
/// page was recognized with. Unresolved candidates that no edit resolved
/// are dropped with a warning. The result itself is left untouched.
pub fn apply_review(result: &RecognitionResult, edits: &[ReviewEdit]) -> Result<ReviewOutcome, OgrError> {
    let mut glyphs = result.glyphs.clone();
    let mut resolved = vec![false; result.unresolved.len()];
    let mut next_id = glyphs.iter().map(|g| g.id + 1).max().unwrap_or(0);
    let mut fresh = |glyph: GlyphId, bbox: BBox, blob_ids: Vec<usize>| {
        let g = RecognizedGlyph {
            id: next_id,
            glyph,
            confidence: 1.0,
            bbox,
            blob_ids,
            alternates: Vec::new(),
        };
        next_id += 1;
        g
    };
    fn position(glyphs: &[RecognizedGlyph], id: usize) -> Result<usize, OgrError> {
        glyphs
            .iter()
            .position(|g| g.id == id)
            .ok_or_else(|| OgrError::InvalidEdit(format!("no glyph with id {id}")))
    }
    fn valid_box(b: &BBox) -> Result<(), OgrError> {
        if b.width() <= 0 || b.height() <= 0 || b.min_x < 0 || b.min_y < 0 {
            return Err(OgrError::InvalidEdit(format!("bad box {b:?}")));
        }
        Ok(())
    }

    for edit in edits {
        match edit {
            ReviewEdit::Accept { id } => {
                let i = position(&glyphs, *id)?;
                glyphs[i].confidence = 1.0;
            }
            ReviewEdit::Replace { id, glyph } => {
                let i = position(&glyphs, *id)?;
                glyphs[i].glyph = *glyph;
                glyphs[i].confidence = 1.0;
            }
            ReviewEdit::Delete { id } => {
                let i = position(&glyphs, *id)?;
                glyphs.remove(i);
            }
            ReviewEdit::Add { glyph, bbox } => {
                valid_box(bbox)?;
                glyphs.push(fresh(*glyph, *bbox, Vec::new()));
            }
            ReviewEdit::Merge { ids, glyph } => {
                if ids.len() < 2 {
                    return Err(OgrError::InvalidEdit("merge needs at least two glyphs".into()));
                }
                let mut idx = ids.iter().map(|id| position(&glyphs, *id)).collect::<Result<Vec<_>, _>>()?;
                idx.sort_unstable();
                idx.dedup();
                if idx.len() != ids.len() {
                    return Err(OgrError::InvalidEdit("merge lists a glyph twice".into()));
                }
                let bbox = idx.iter().skip(1).fold(glyphs[idx[0]].bbox, |b, &i| b.union(&glyphs[i].bbox));
                let mut blob_ids: Vec<usize> = idx.iter().flat_map(|&i| glyphs[i].blob_ids.clone()).collect();
                blob_ids.sort_unstable();
                for &i in idx.iter().rev() {
                    glyphs.remove(i);
                }
                glyphs.push(fresh(*glyph, bbox, blob_ids));
            }
            ReviewEdit::Split { id, parts } => {
                if parts.is_empty() {
                    return Err(OgrError::InvalidEdit("split needs at least one part".into()));
                }
                let i = position(&glyphs, *id)?;
                for p in parts {
                    valid_box(&p.bbox)?;
                }
                let old = glyphs.remove(i);
                for p in parts {
                    // blobs go to the part whose box holds their centroid
                    let blob_ids = old
                        .blob_ids
                        .iter()
                        .copied()
                        .filter(|b| {
                            result.blobs.iter().find(|x| x.id == *b).is_some_and(|x| {
                                let (cx, cy) = x.centroid;
                                cx >= p.bbox.min_x as f64
                                    && cx < p.bbox.max_x as f64
                                    && cy >= p.bbox.min_y as f64
                                    && cy < p.bbox.max_y as f64
                            })
                        })
                        .collect();
                    glyphs.push(fresh(p.glyph, p.bbox, blob_ids));
                }
            }
            ReviewEdit::Resolve { candidate, glyph } => {
                let u = result
                    .unresolved
                    .iter()
                    .position(|u| u.id == *candidate)
                    .ok_or_else(|| OgrError::InvalidEdit(format!("no unresolved candidate {candidate}")))?;
                if resolved[u] {
                    return Err(OgrError::InvalidEdit(format!("candidate {candidate} resolved twice")));
                }
                resolved[u] = true;
                let c = &result.unresolved[u];
                glyphs.push(fresh(*glyph, c.bbox, c.blob_ids.clone()));
            }
        }
    }
    let warnings = result
        .unresolved
        .iter()
        .zip(&resolved)
        .filter(|(_, done)| !**done)
        .map(|(u, _)| {
            format!(
                "dropped unresolved candidate {} at ({}, {})-({}, {})",
                u.id, u.bbox.min_x, u.bbox.min_y, u.bbox.max_x, u.bbox.max_y
            )
        })
        .collect();
    let document = build_document(&glyphs, &result.segmentation)?;
    Ok(ReviewOutcome { document, glyphs, warnings })
}
