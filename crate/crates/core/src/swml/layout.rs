//! Sign geometry from catalog asset extents, and vertical column layout.

use serde::{Deserialize, Serialize};

use super::model::{GlyphPlacement, Sign};
use super::SwmlError;
use crate::geometry::BBox;
use crate::iswa::Catalog;

/// Smallest box holding every placed glyph image.
pub fn compute_bbox(sign: &Sign, catalog: &Catalog) -> Result<BBox, SwmlError> {
    let mut bbox: Option<BBox> = None;
    for p in &sign.placements {
        let desc = catalog.get(&p.glyph).ok_or(SwmlError::UnknownGlyph(p.glyph))?;
        let b = BBox::from_origin_size(p.x as i64, p.y as i64, desc.width() as i64, desc.height() as i64);
        bbox = Some(bbox.map_or(b, |acc| acc.union(&b)));
    }
    bbox.ok_or_else(|| SwmlError::InvariantViolation(format!("sign {} has no glyphs", sign.sign_id)))
}

/// Moves the sign so its box starts at the origin, sorts placements into
/// draw order and renumbers `z` densely from 0.
pub fn normalize_sign(sign: &Sign, catalog: &Catalog) -> Result<Sign, SwmlError> {
    let bbox = compute_bbox(sign, catalog)?;
    let mut placements: Vec<GlyphPlacement> = sign
        .placements
        .iter()
        .map(|p| GlyphPlacement {
            x: (p.x as i64 - bbox.min_x) as u32,
            y: (p.y as i64 - bbox.min_y) as u32,
            ..*p
        })
        .collect();
    placements.sort_by_key(GlyphPlacement::draw_key);
    for (z, p) in placements.iter_mut().enumerate() {
        p.z = z as u32;
    }
    Ok(Sign {
        placements,
        ..sign.clone()
    })
}

/// Position of one sign in a column. `offset_y` is measured from the column
/// top to the sign's box top; `offset_x` from the column axis to the box's
/// left edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSlot {
    pub sign_id: String,
    pub offset_y: i64,
    pub offset_x: i64,
    pub bbox: BBox,
}

/// Stacks signs top to bottom, each centred on the column axis.
pub fn layout_column(signs: &[Sign], spacing: u32, catalog: &Catalog) -> Result<Vec<ColumnSlot>, SwmlError> {
    let mut slots = Vec::with_capacity(signs.len());
    let mut next_y = 0i64;
    for sign in signs {
        let bbox = compute_bbox(sign, catalog)?;
        slots.push(ColumnSlot {
            sign_id: sign.sign_id.clone(),
            offset_y: next_y,
            offset_x: -(bbox.width() / 2),
            bbox,
        });
        next_y += bbox.height() + spacing as i64;
    }
    Ok(slots)
}
