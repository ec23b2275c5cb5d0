//! Two-stage glyph classification.
//!
//! Stage one prunes whole `(category, group)` families whose feature envelope
//! (hole count, compactness) cannot contain the candidate. Stage two matches
//! the candidate against every remaining template on a normalized soft grid.

use std::collections::BTreeMap;

use super::{extract_features, FeatureVector, OgrError};
use crate::iswa::{Catalog, GlyphId};
use crate::raster::BinaryImage;

pub const GRID: usize = 32;
const SUPERSAMPLE: usize = 3;

/// Holes may differ by this much from a family's range (broken or filled
/// loops from scanning).
pub const HOLE_TOLERANCE: usize = 1;
/// Compactness may stray this factor outside a family's range.
pub const COMPACTNESS_FACTOR: f64 = 1.6;

#[derive(Clone, Debug)]
pub struct Template {
    pub glyph: GlyphId,
    pub features: FeatureVector,
    grid: Vec<f32>,
}

#[derive(Clone, Debug)]
struct Family {
    holes: (usize, usize),
    compactness: (f64, f64),
    members: Vec<usize>,
}

impl Family {
    fn admits(&self, f: &FeatureVector) -> bool {
        f.hole_count + HOLE_TOLERANCE >= self.holes.0
            && f.hole_count <= self.holes.1 + HOLE_TOLERANCE
            && f.compactness * COMPACTNESS_FACTOR >= self.compactness.0
            && f.compactness <= self.compactness.1 * COMPACTNESS_FACTOR
    }
}

/// Precomputed templates for a catalog. Building it renders every glyph
/// once; reuse it across pages.
#[derive(Clone, Debug)]
pub struct TemplateIndex {
    templates: Vec<Template>,
    families: BTreeMap<(u8, u8), Family>,
}

impl TemplateIndex {
    pub fn build(catalog: &Catalog) -> Self {
        let templates: Vec<Template> = catalog
            .iter()
            .map(|d| Template {
                glyph: d.id,
                features: extract_features(&d.image),
                grid: normalized_grid(&d.image),
            })
            .collect();
        let mut families: BTreeMap<(u8, u8), Family> = BTreeMap::new();
        for (i, t) in templates.iter().enumerate() {
            let f = &t.features;
            let fam = families.entry((t.glyph.category, t.glyph.group)).or_insert(Family {
                holes: (f.hole_count, f.hole_count),
                compactness: (f.compactness, f.compactness),
                members: Vec::new(),
            });
            fam.holes = (fam.holes.0.min(f.hole_count), fam.holes.1.max(f.hole_count));
            fam.compactness = (fam.compactness.0.min(f.compactness), fam.compactness.1.max(f.compactness));
            fam.members.push(i);
        }
        Self { templates, families }
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    /// Families that survive stage one for these features.
    pub fn admitted_families(&self, features: &FeatureVector) -> Vec<(u8, u8)> {
        self.families
            .iter()
            .filter(|(_, fam)| fam.admits(features))
            .map(|(k, _)| *k)
            .collect()
    }
}

/// Ranked `(glyph, confidence)` pairs, best first, at most `limit` long.
/// Confidence is in `[0, 1]`; a glyph matched against its own template
/// scores exactly 1.
pub fn classify(
    features: &FeatureVector,
    mask: &BinaryImage,
    index: &TemplateIndex,
    limit: usize,
) -> Result<Vec<(GlyphId, f64)>, OgrError> {
    if features.area == 0 {
        return Err(OgrError::NoCandidates);
    }
    let grid = normalized_grid(mask);
    let mut scored: Vec<(GlyphId, f64)> = index
        .families
        .values()
        .filter(|fam| fam.admits(features))
        .flat_map(|fam| fam.members.iter())
        .map(|&i| {
            let t = &index.templates[i];
            (t.glyph, similarity(&grid, &t.grid) * size_agreement(features, &t.features))
        })
        .collect();
    if scored.is_empty() {
        return Err(OgrError::NoCandidates);
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(limit.max(1));
    Ok(scored)
}

/// Fuzzy Jaccard: `Σ min / Σ max`.
pub fn similarity(a: &[f32], b: &[f32]) -> f64 {
    let (mut lo, mut hi) = (0f64, 0f64);
    for (x, y) in a.iter().zip(b) {
        lo += x.min(*y) as f64;
        hi += x.max(*y) as f64;
    }
    if hi == 0.0 { 0.0 } else { lo / hi }
}

/// Grids are scale-free, so a dot and a disc look alike; this mild factor
/// keeps absolute size in play.
fn size_agreement(a: &FeatureVector, b: &FeatureVector) -> f64 {
    let da = (a.width.max(a.height)) as f64;
    let db = (b.width.max(b.height)) as f64;
    (da.min(db) / da.max(db)).sqrt()
}

/// Samples the mask on a `GRID × GRID` window centred on the ink centroid,
/// just large enough to hold the ink, then blurs it. Aspect ratio is kept.
pub fn normalized_grid(mask: &BinaryImage) -> Vec<f32> {
    let mut grid = vec![0f32; GRID * GRID];
    let Some(bbox) = mask.ink_bbox() else {
        return grid;
    };
    let (mut n, mut sx, mut sy) = (0f64, 0f64, 0f64);
    for y in bbox.min_y..bbox.max_y {
        for x in bbox.min_x..bbox.max_x {
            if mask.get_signed(x, y) {
                n += 1.0;
                sx += x as f64 + 0.5;
                sy += y as f64 + 0.5;
            }
        }
    }
    let (cx, cy) = (sx / n, sy / n);
    let half = [
        cx - bbox.min_x as f64,
        bbox.max_x as f64 - cx,
        cy - bbox.min_y as f64,
        bbox.max_y as f64 - cy,
    ]
    .into_iter()
    .fold(0.5, f64::max);
    let step = 2.0 * half / (GRID * SUPERSAMPLE) as f64;
    let weight = 1.0 / (SUPERSAMPLE * SUPERSAMPLE) as f32;
    for gy in 0..GRID * SUPERSAMPLE {
        let py = cy - half + (gy as f64 + 0.5) * step;
        for gx in 0..GRID * SUPERSAMPLE {
            let px = cx - half + (gx as f64 + 0.5) * step;
            if mask.get_signed(px.floor() as i64, py.floor() as i64) {
                grid[(gy / SUPERSAMPLE) * GRID + gx / SUPERSAMPLE] += weight;
            }
        }
    }
    blur(&blur(&grid, true), false)
}

fn blur(grid: &[f32], horizontal: bool) -> Vec<f32> {
    let at = |x: i64, y: i64| -> f32 {
        if x < 0 || y < 0 || x >= GRID as i64 || y >= GRID as i64 {
            0.0
        } else {
            grid[y as usize * GRID + x as usize]
        }
    };
    let mut out = vec![0f32; GRID * GRID];
    for y in 0..GRID as i64 {
        for x in 0..GRID as i64 {
            let (dx, dy) = if horizontal { (1, 0) } else { (0, 1) };
            out[y as usize * GRID + x as usize] =
                0.25 * at(x - dx, y - dy) + 0.5 * at(x, y) + 0.25 * at(x + dx, y + dy);
        }
    }
    out
}
