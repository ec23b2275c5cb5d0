//! Connected ink components.

use serde::{Deserialize, Serialize};

use crate::geometry::BBox;
use crate::raster::BinaryImage;

/// Horizontal run `[x_start, x_end)` on row `y`, page coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    pub y: i64,
    pub x_start: i64,
    pub x_end: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentBlob {
    pub id: usize,
    pub bbox: BBox,
    pub area: usize,
    pub centroid: (f64, f64),
    pub runs: Vec<Run>,
}

impl ComponentBlob {
    /// Paints the blob into `target`, whose top-left sits at `origin`.
    pub fn paint(&self, target: &mut BinaryImage, origin: (i64, i64)) {
        for run in &self.runs {
            for x in run.x_start..run.x_end {
                target.set_signed(x - origin.0, run.y - origin.1, true);
            }
        }
    }

    /// The blob cropped to its own box.
    pub fn mask(&self) -> BinaryImage {
        let mut img = BinaryImage::new(self.bbox.width() as u32, self.bbox.height() as u32);
        self.paint(&mut img, (self.bbox.min_x, self.bbox.min_y));
        img
    }
}

pub const DEFAULT_MIN_AREA: usize = 4;

/// 8-connected components in raster order of their first pixel; those
/// smaller than `min_area` pixels are dropped as noise.
pub fn extract_components(binary: &BinaryImage, min_area: usize) -> Vec<ComponentBlob> {
    let (w, h) = (binary.width() as i64, binary.height() as i64);
    let mut label = vec![u32::MAX; (w * h) as usize];
    let mut blobs = Vec::new();
    let mut stack = Vec::new();
    for sy in 0..h {
        for sx in 0..w {
            let idx = (sy * w + sx) as usize;
            if !binary.get(sx as u32, sy as u32) || label[idx] != u32::MAX {
                continue;
            }
            let current = blobs.len() as u32;
            label[idx] = current;
            stack.push((sx, sy));
            let mut pixels = Vec::new();
            while let Some((x, y)) = stack.pop() {
                pixels.push((x, y));
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let (nx, ny) = (x + dx, y + dy);
                        if (dx, dy) == (0, 0) || nx < 0 || ny < 0 || nx >= w || ny >= h {
                            continue;
                        }
                        let nidx = (ny * w + nx) as usize;
                        if label[nidx] == u32::MAX && binary.get(nx as u32, ny as u32) {
                            label[nidx] = current;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
            blobs.push(pixels);
        }
    }
    blobs
        .into_iter()
        .filter(|p| p.len() >= min_area)
        .enumerate()
        .map(|(id, mut pixels)| {
            pixels.sort_by_key(|&(x, y)| (y, x));
            let area = pixels.len();
            let (sx, sy) = pixels
                .iter()
                .fold((0f64, 0f64), |(ax, ay), &(x, y)| (ax + x as f64 + 0.5, ay + y as f64 + 0.5));
            let mut bbox = BBox::pixel(pixels[0].0, pixels[0].1);
            let mut runs: Vec<Run> = Vec::new();
            for &(x, y) in &pixels {
                bbox = bbox.union(&BBox::pixel(x, y));
                match runs.last_mut() {
                    Some(r) if r.y == y && r.x_end == x => r.x_end += 1,
                    _ => runs.push(Run { y, x_start: x, x_end: x + 1 }),
                }
            }
            ComponentBlob {
                id,
                bbox,
                area,
                centroid: (sx / area as f64, sy / area as f64),
                runs,
            }
        })
        .collect()
}
