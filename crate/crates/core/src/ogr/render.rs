//! Synthetic page rendering: SWML plus catalog to a grayscale page, with
//! optional scan noise and glyph rotation. Used to test recognition
//! end-to-end and to preview documents.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::OgrError;
use crate::geometry::BBox;
use crate::iswa::{Catalog, GlyphId};
use crate::raster::{BinaryImage, GrayImage};
use crate::swml::{compute_bbox, Column, GlyphPlacement, Sign, SignDocument, SwmlError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderOptions {
    pub margin: u32,
    pub column_gap: u32,
    pub sign_spacing: u32,
    /// Standard deviation of additive Gaussian noise, in gray levels.
    pub noise_sigma: f64,
    /// Each glyph is rotated by a uniform angle in `±jitter_degrees`.
    pub jitter_degrees: f64,
    pub seed: u64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            margin: 40,
            column_gap: 60,
            sign_spacing: 40,
            noise_sigma: 0.0,
            jitter_degrees: 0.0,
            seed: 0,
        }
    }
}

/// Where a glyph ended up on the page.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderedGlyph {
    pub column: usize,
    pub sign: usize,
    pub glyph: GlyphId,
    /// Ink box on the page (after rotation, if any).
    pub bbox: BBox,
}

#[derive(Clone, Debug)]
pub struct RenderedPage {
    pub image: GrayImage,
    pub glyphs: Vec<RenderedGlyph>,
}

/// Columns run left to right; each sign is centred on its column's axis and
/// signs are stacked `sign_spacing` apart.
pub fn render_page(doc: &SignDocument, catalog: &Catalog, options: &RenderOptions) -> Result<RenderedPage, OgrError> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let margin = options.margin as i64;
    let mut ink = Vec::<(GlyphId, BinaryImage, i64, i64, usize, usize)>::new();
    let (mut x_cursor, mut page_h) = (margin, 0i64);
    for (ci, column) in doc.columns.iter().enumerate() {
        let boxes: Vec<BBox> = column
            .signs
            .iter()
            .map(|s| compute_bbox(s, catalog))
            .collect::<Result<_, _>>()?;
        let width = boxes.iter().map(BBox::width).max().unwrap_or(0);
        let axis = x_cursor + width / 2;
        let mut y_cursor = margin;
        for (si, (sign, bbox)) in column.signs.iter().zip(&boxes).enumerate() {
            let dx = axis - bbox.width() / 2 - bbox.min_x;
            let dy = y_cursor - bbox.min_y;
            for p in &sign.placements {
                let desc = catalog.get(&p.glyph).ok_or(SwmlError::UnknownGlyph(p.glyph))?;
                ink.push((p.glyph, (*desc.image).clone(), p.x as i64 + dx, p.y as i64 + dy, ci, si));
            }
            y_cursor += bbox.height() + options.sign_spacing as i64;
        }
        page_h = page_h.max(y_cursor - options.sign_spacing as i64 + margin);
        x_cursor += width + options.column_gap as i64;
    }
    let page_w = (x_cursor - options.column_gap as i64 + margin).max(2 * margin).max(1);
    let page_h = page_h.max(2 * margin).max(1);

    let mut mask = BinaryImage::new(page_w as u32, page_h as u32);
    let mut glyphs = Vec::with_capacity(ink.len());
    for (glyph, image, x, y, column, sign) in ink {
        let (w, h) = (image.width() as i64, image.height() as i64);
        let (image, x, y) = if options.jitter_degrees > 0.0 {
            let angle = rng.random_range(-options.jitter_degrees..=options.jitter_degrees);
            let rotated = image.rotated(angle);
            let (rw, rh) = (rotated.width() as i64, rotated.height() as i64);
            (rotated, x - (rw - w) / 2, y - (rh - h) / 2)
        } else {
            (image, x, y)
        };
        let Some(local) = image.ink_bbox() else { continue };
        for yy in local.min_y..local.max_y {
            for xx in local.min_x..local.max_x {
                if image.get_signed(xx, yy) {
                    mask.set_signed(x + xx, y + yy, true);
                }
            }
        }
        glyphs.push(RenderedGlyph {
            column,
            sign,
            glyph,
            bbox: local.translate(x, y),
        });
    }

    let mut image = mask.to_gray();
    if options.noise_sigma > 0.0 {
        let normal = Normal::new(0.0, options.noise_sigma).map_err(|e| OgrError::Config(e.to_string()))?;
        for p in image.pixels_mut() {
            let v = *p as f64 + normal.sample(&mut rng);
            *p = v.round().clamp(0.0, 255.0) as u8;
        }
    }
    Ok(RenderedPage { image, glyphs })
}

/// Shape of generated test documents.
#[derive(Clone, Debug)]
pub struct SynthSpec {
    pub columns: usize,
    pub signs_per_column: usize,
    pub max_glyphs_per_sign: usize,
    /// Horizontal and vertical clearance between glyphs of one sign.
    pub glyph_gap: u32,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            columns: 3,
            signs_per_column: 4,
            max_glyphs_per_sign: 4,
            glyph_gap: 12,
        }
    }
}

/// A random document over the catalog: each sign holds 1..=max glyphs in
/// rows of at most two, `glyph_gap` apart.
pub fn synth_document(catalog: &Catalog, spec: &SynthSpec, seed: u64) -> SignDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<GlyphId> = catalog.ids().collect();
    let gap = spec.glyph_gap;
    let mut columns = Vec::new();
    for c in 0..spec.columns {
        let mut signs = Vec::new();
        for s in 0..spec.signs_per_column {
            let n = rng.random_range(1..=spec.max_glyphs_per_sign.max(1));
            let mut placements: Vec<GlyphPlacement> = Vec::new();
            let (mut row_y, mut row_h, mut x) = (0u32, 0u32, 0u32);
            for k in 0..n {
                if k > 0 && k % 2 == 0 {
                    row_y += row_h + gap;
                    row_h = 0;
                    x = 0;
                }
                let glyph = ids[rng.random_range(0..ids.len())];
                let d = catalog.get(&glyph).expect("id from catalog");
                let drop = rng.random_range(0..=3);
                if placements.iter().any(|p| (p.glyph, p.x, p.y) == (glyph, x, row_y + drop)) {
                    continue;
                }
                placements.push(GlyphPlacement::new(glyph, x, row_y + drop).with_z(k as u32));
                x += d.width() + gap;
                row_h = row_h.max(d.height() + drop);
            }
            signs.push(Sign::new(format!("c{}s{}", c + 1, s + 1), placements));
        }
        columns.push(Column { signs });
    }
    SignDocument { meta: Default::default(), columns }
}
