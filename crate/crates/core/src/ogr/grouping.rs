//! Merging nearby blobs into glyph candidates (eyes, dotted marks and other
//! glyphs drawn in several pieces).

use serde::{Deserialize, Serialize};

use super::ComponentBlob;
use crate::geometry::BBox;
use crate::raster::BinaryImage;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlyphCandidate {
    /// Ids of the member blobs, ascending.
    pub blob_ids: Vec<usize>,
    pub bbox: BBox,
}

impl GlyphCandidate {
    /// Union of the member blobs cropped to the candidate box.
    pub fn mask(&self, blobs: &[ComponentBlob]) -> BinaryImage {
        let mut img = BinaryImage::new(self.bbox.width() as u32, self.bbox.height() as u32);
        for id in &self.blob_ids {
            if let Some(b) = blobs.iter().find(|b| b.id == *id) {
                b.paint(&mut img, (self.bbox.min_x, self.bbox.min_y));
            }
        }
        img
    }
}

struct Groups {
    parent: Vec<usize>,
    bbox: Vec<BBox>,
}

impl Groups {
    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }
}

/// Single-linkage grouping: two blobs join when their box gap is at most
/// `proximity` pixels, unless the merged group would exceed `max_glyph_size`
/// on either side. `proximity == 0` keeps every blob on its own.
///
/// Pairs are considered closest first, ties broken top-left first, so the
/// result does not depend on the input order.
pub fn group_blobs(blobs: &[ComponentBlob], proximity: u32, max_glyph_size: u32) -> Vec<GlyphCandidate> {
    let n = blobs.len();
    let mut groups = Groups {
        parent: (0..n).collect(),
        bbox: blobs.iter().map(|b| b.bbox).collect(),
    };
    if proximity > 0 {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let gap = blobs[i].bbox.gap(&blobs[j].bbox);
                if gap <= proximity as i64 {
                    let key = |b: &ComponentBlob| (b.bbox.min_y, b.bbox.min_x, b.bbox.max_y, b.bbox.max_x, b.id);
                    let (a, b) = (key(&blobs[i]), key(&blobs[j]));
                    pairs.push((gap, a.min(b), a.max(b), i, j));
                }
            }
        }
        pairs.sort();
        for (_, _, _, i, j) in pairs {
            let (ri, rj) = (groups.find(i), groups.find(j));
            if ri == rj {
                continue;
            }
            let merged = groups.bbox[ri].union(&groups.bbox[rj]);
            if merged.width() > max_glyph_size as i64 || merged.height() > max_glyph_size as i64 {
                continue;
            }
            let (keep, drop) = (ri.min(rj), ri.max(rj));
            groups.parent[drop] = keep;
            groups.bbox[keep] = merged;
        }
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = groups.find(i);
        members[r].push(blobs[i].id);
    }
    let mut out: Vec<GlyphCandidate> = members
        .into_iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(r, mut blob_ids)| {
            blob_ids.sort_unstable();
            GlyphCandidate { blob_ids, bbox: groups.bbox[r] }
        })
        .collect();
    out.sort_by_key(|c| (c.bbox.min_y, c.bbox.min_x, c.blob_ids.clone()));
    out
}
