use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    binarize, classify, extract_components, extract_features, group_blobs, segment_signs, Binarization,
    ComponentBlob, OgrError, SegmentConfig, TemplateIndex,
};
use crate::geometry::BBox;
use crate::iswa::{Catalog, GlyphId};
use crate::raster::{BinaryImage, GrayImage};
use crate::swml::{Column, GlyphPlacement, Sign, SignDocument, SignSource};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OgrConfig {
    pub binarization: Binarization,
    /// Treat the minority intensity class as ink.
    pub auto_polarity: bool,
    pub min_blob_area: usize,
    /// Blobs this close (box gap, pixels) are one glyph candidate; 0 disables.
    pub grouping_proximity: u32,
    pub max_glyph_size: u32,
    /// Best matches below this go to the unresolved list.
    pub min_confidence: f64,
    /// Ranked alternates kept per glyph, including the winner.
    pub alternates: usize,
    /// When a candidate matches poorly, also try it with strokes thickened
    /// by one pixel (thin or eroded print).
    pub stroke_recovery: bool,
    pub segmentation: SegmentConfig,
}

impl Default for OgrConfig {
    fn default() -> Self {
        Self {
            binarization: Binarization::Otsu,
            auto_polarity: true,
            min_blob_area: super::DEFAULT_MIN_AREA,
            grouping_proximity: 6,
            max_glyph_size: 96,
            min_confidence: 0.5,
            alternates: 5,
            stroke_recovery: true,
            segmentation: SegmentConfig::default(),
        }
    }
}

impl OgrConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, OgrError> {
        let config: OgrConfig = toml::from_str(text).map_err(|e| OgrError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), OgrError> {
        if !(0.0..=1.0).contains(&self.min_confidence) {
            return Err(OgrError::Config("min_confidence must be within [0, 1]".into()));
        }
        if self.max_glyph_size == 0 || self.alternates == 0 {
            return Err(OgrError::Config("max_glyph_size and alternates must be positive".into()));
        }
        if !(self.segmentation.gap_multiplier.is_finite() && self.segmentation.gap_multiplier >= 0.0) {
            return Err(OgrError::Config("gap_multiplier must be a non-negative number".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alternate {
    pub glyph: GlyphId,
    pub confidence: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecognizedGlyph {
    pub id: usize,
    pub glyph: GlyphId,
    pub confidence: f64,
    pub bbox: BBox,
    pub blob_ids: Vec<usize>,
    pub alternates: Vec<Alternate>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnresolvedReason {
    NoCandidates,
    LowConfidence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnresolvedCandidate {
    pub id: usize,
    pub bbox: BBox,
    pub blob_ids: Vec<usize>,
    pub reason: UnresolvedReason,
    pub alternates: Vec<Alternate>,
}

/// Everything recognition learned about a page. Serializes to the JSON
/// sidecar report; review edits apply to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecognitionResult {
    pub width: u32,
    pub height: u32,
    pub blobs: Vec<ComponentBlob>,
    pub glyphs: Vec<RecognizedGlyph>,
    pub unresolved: Vec<UnresolvedCandidate>,
    pub document: SignDocument,
    pub segmentation: SegmentConfig,
}

impl RecognitionResult {
    /// Every blob lands in exactly one recognized glyph or unresolved
    /// candidate.
    pub fn is_conserved(&self) -> bool {
        let mut seen: Vec<usize> = self
            .glyphs
            .iter()
            .flat_map(|g| g.blob_ids.iter())
            .chain(self.unresolved.iter().flat_map(|u| u.blob_ids.iter()))
            .copied()
            .collect();
        seen.sort_unstable();
        let mut all: Vec<usize> = self.blobs.iter().map(|b| b.id).collect();
        all.sort_unstable();
        seen == all
    }
}

/// A catalog's templates plus recognition settings, reusable across pages.
pub struct Recognizer {
    index: TemplateIndex,
    config: OgrConfig,
}

impl Recognizer {
    pub fn new(catalog: &Catalog, config: OgrConfig) -> Result<Self, OgrError> {
        config.validate()?;
        Ok(Self { index: TemplateIndex::build(catalog), config })
    }

    pub fn config(&self) -> &OgrConfig {
        &self.config
    }

    pub fn index(&self) -> &TemplateIndex {
        &self.index
    }

    fn rank(&self, mask: &BinaryImage) -> Result<Vec<(GlyphId, f64)>, OgrError> {
        let cfg = &self.config;
        let direct = classify(&extract_features(mask), mask, &self.index, cfg.alternates);
        let weak = match &direct {
            Ok(ranked) => ranked[0].1 < cfg.min_confidence,
            Err(OgrError::NoCandidates) => true,
            Err(_) => false,
        };
        if !(cfg.stroke_recovery && weak) {
            return direct;
        }
        let thick = mask.dilated();
        let retry = classify(&extract_features(&thick), &thick, &self.index, cfg.alternates);
        let mut best: BTreeMap<GlyphId, f64> = BTreeMap::new();
        for (g, score) in direct.iter().chain(retry.iter()).flatten() {
            let slot = best.entry(*g).or_insert(0.0);
            *slot = slot.max(*score);
        }
        if best.is_empty() {
            return direct;
        }
        let mut ranked: Vec<(GlyphId, f64)> = best.into_iter().collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked.truncate(cfg.alternates);
        Ok(ranked)
    }

    pub fn recognize(&self, page: &GrayImage) -> Result<RecognitionResult, OgrError> {
        let cfg = &self.config;
        let mask = binarize(page, cfg.binarization, cfg.auto_polarity)?;
        let blobs = extract_components(&mask, cfg.min_blob_area);
        let candidates = group_blobs(&blobs, cfg.grouping_proximity, cfg.max_glyph_size);
        let mut glyphs = Vec::new();
        let mut unresolved = Vec::new();
        for cand in candidates {
            let cmask = cand.mask(&blobs);
            match self.rank(&cmask) {
                Ok(ranked) => {
                    let alternates: Vec<Alternate> =
                        ranked.iter().map(|&(glyph, confidence)| Alternate { glyph, confidence }).collect();
                    let (glyph, confidence) = ranked[0];
                    if confidence >= cfg.min_confidence {
                        glyphs.push(RecognizedGlyph {
                            id: glyphs.len(),
                            glyph,
                            confidence,
                            bbox: cand.bbox,
                            blob_ids: cand.blob_ids,
                            alternates,
                        });
                    } else {
                        unresolved.push(UnresolvedCandidate {
                            id: unresolved.len(),
                            bbox: cand.bbox,
                            blob_ids: cand.blob_ids,
                            reason: UnresolvedReason::LowConfidence,
                            alternates,
                        });
                    }
                }
                Err(OgrError::NoCandidates) => unresolved.push(UnresolvedCandidate {
                    id: unresolved.len(),
                    bbox: cand.bbox,
                    blob_ids: cand.blob_ids,
                    reason: UnresolvedReason::NoCandidates,
                    alternates: Vec::new(),
                }),
                Err(e) => return Err(e),
            }
        }
        let document = build_document(&glyphs, &cfg.segmentation)?;
        Ok(RecognitionResult {
            width: page.width(),
            height: page.height(),
            blobs,
            glyphs,
            unresolved,
            document,
            segmentation: cfg.segmentation.clone(),
        })
    }
}

/// One-shot recognition; prefer [`Recognizer`] for several pages.
pub fn recognize(page: &GrayImage, catalog: &Catalog, config: &OgrConfig) -> Result<RecognitionResult, OgrError> {
    Recognizer::new(catalog, config.clone())?.recognize(page)
}

/// Segments glyphs into a draft document. Placements are relative to each
/// sign's top-left ink corner.
pub(crate) fn build_document(glyphs: &[RecognizedGlyph], config: &SegmentConfig) -> Result<SignDocument, OgrError> {
    let boxes: Vec<BBox> = glyphs.iter().map(|g| g.bbox).collect();
    let mut columns = Vec::new();
    for (ci, column) in segment_signs(&boxes, config).into_iter().enumerate() {
        let mut signs = Vec::new();
        for (si, members) in column.into_iter().enumerate() {
            let min_x = members.iter().map(|&i| boxes[i].min_x).min().unwrap_or(0);
            let min_y = members.iter().map(|&i| boxes[i].min_y).min().unwrap_or(0);
            let mut placements: Vec<GlyphPlacement> = Vec::new();
            for &i in &members {
                let p = GlyphPlacement::new(
                    glyphs[i].glyph,
                    (boxes[i].min_x - min_x) as u32,
                    (boxes[i].min_y - min_y) as u32,
                );
                // two identical detections at one spot are one placement
                if !placements.contains(&p) {
                    placements.push(p);
                }
            }
            let placements = placements.into_iter().enumerate().map(|(z, p)| p.with_z(z as u32)).collect();
            signs.push(Sign::new(format!("ogr-{}-{}", ci + 1, si + 1), placements).with_source(SignSource::Ogr).canonical());
        }
        columns.push(Column { signs });
    }
    let doc = SignDocument { meta: Default::default(), columns };
    doc.check()?;
    Ok(doc)
}

/// The page dimmed, with recognized glyph boxes drawn black and unresolved
/// candidates drawn mid-gray, for visual review.
pub fn overlay(page: &GrayImage, result: &RecognitionResult) -> GrayImage {
    let mut out = page.clone();
    for p in out.pixels_mut() {
        *p = 160 + *p / 3;
    }
    let mut frame = |b: &BBox, value: u8| {
        let (w, h) = (out.width() as i64, out.height() as i64);
        let mut put = |x: i64, y: i64| {
            if x >= 0 && y >= 0 && x < w && y < h {
                out.set(x as u32, y as u32, value);
            }
        };
        for x in b.min_x - 1..=b.max_x {
            put(x, b.min_y - 1);
            put(x, b.max_y);
        }
        for y in b.min_y - 1..=b.max_y {
            put(b.min_x - 1, y);
            put(b.max_x, y);
        }
    };
    for g in &result.glyphs {
        frame(&g.bbox, 0);
    }
    for u in &result.unresolved {
        frame(&u.bbox, 96);
    }
    out
}
