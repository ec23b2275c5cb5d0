//! Grayscale and binary raster types shared by the catalog assets, the
//! synthetic renderer and the recognition pipeline.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::BBox;

/// Errors raised while decoding or encoding raster files.
#[derive(Debug, thiserror::Error)]
pub enum RasterError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot decode image {path}: {reason}")]
    Decode { path: String, reason: String },
    #[error("cannot encode image: {0}")]
    Encode(String),
    #[error("image has zero width or height")]
    Empty,
}

/// 8-bit grayscale page. 0 is black, 255 is white.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, fill: u8) -> Self {
        Self {
            width,
            height,
            pixels: vec![fill; width as usize * height as usize],
        }
    }

    pub fn from_raw(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::Empty);
        }
        assert_eq!(pixels.len(), width as usize * height as usize);
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: u8) {
        let w = self.width as usize;
        self.pixels[y as usize * w + x as usize] = value;
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    /// Decodes any format supported by the `image` crate (PNG, PGM/PBM).
    pub fn decode(bytes: &[u8]) -> Result<Self, RasterError> {
        let img = image::load_from_memory(bytes).map_err(|e| RasterError::Decode {
            path: "<memory>".into(),
            reason: e.to_string(),
        })?;
        let luma = img.into_luma8();
        let (w, h) = luma.dimensions();
        Self::from_raw(w, h, luma.into_raw())
    }

    pub fn open(path: &Path) -> Result<Self, RasterError> {
        let bytes = std::fs::read(path).map_err(|source| RasterError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::decode(&bytes).map_err(|e| match e {
            RasterError::Decode { reason, .. } => RasterError::Decode {
                path: path.display().to_string(),
                reason,
            },
            other => other,
        })
    }

    pub fn encode_png(&self) -> Result<Vec<u8>, RasterError> {
        let buf = image::GrayImage::from_raw(self.width, self.height, self.pixels.clone())
            .ok_or(RasterError::Empty)?;
        let mut out = std::io::Cursor::new(Vec::new());
        buf.write_to(&mut out, image::ImageFormat::Png)
            .map_err(|e| RasterError::Encode(e.to_string()))?;
        Ok(out.into_inner())
    }

    pub fn save_png(&self, path: &Path) -> Result<(), RasterError> {
        let bytes = self.encode_png()?;
        std::fs::write(path, bytes).map_err(|source| RasterError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Boolean mask; `true` marks ink.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut img = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                if f(x, y) {
                    img.set(x, y, true);
                }
            }
        }
        img
    }

    /// Parses a picture drawn with `#` for ink and `.` for background, one
    /// row per line. Handy for tests.
    pub fn from_ascii(art: &str) -> Self {
        let rows: Vec<&str> = art
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let height = rows.len() as u32;
        let width = rows.iter().map(|r| r.len()).max().unwrap_or(0) as u32;
        Self::from_fn(width, height, |x, y| {
            rows[y as usize].as_bytes().get(x as usize) == Some(&b'#')
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    /// Out-of-range coordinates read as background.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            false
        } else {
            self.get(x as u32, y as u32)
        }
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        let w = self.width as usize;
        self.bits[y as usize * w + x as usize] = value;
    }

    pub fn set_signed(&mut self, x: i64, y: i64, value: bool) {
        if x >= 0 && y >= 0 && x < self.width as i64 && y < self.height as i64 {
            self.set(x as u32, y as u32, value);
        }
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_blank(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Tight box around the ink, `None` when blank.
    pub fn ink_bbox(&self) -> Option<BBox> {
        let mut bbox: Option<BBox> = None;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    let px = BBox::pixel(x as i64, y as i64);
                    bbox = Some(match bbox {
                        Some(b) => b.union(&px),
                        None => px,
                    });
                }
            }
        }
        bbox
    }

    /// Copy of the region `bbox` (clipped reads are background).
    pub fn crop(&self, bbox: &BBox) -> BinaryImage {
        BinaryImage::from_fn(bbox.width() as u32, bbox.height() as u32, |x, y| {
            self.get_signed(bbox.min_x + x as i64, bbox.min_y + y as i64)
        })
    }

    /// Crop to the ink box; a blank image stays as is.
    pub fn trimmed(&self) -> BinaryImage {
        match self.ink_bbox() {
            Some(b) => self.crop(&b),
            None => self.clone(),
        }
    }

    /// Rotate clockwise by a quarter turn.
    pub fn rotate90(&self) -> BinaryImage {
        let (w, h) = (self.width, self.height);
        BinaryImage::from_fn(h, w, |x, y| self.get(y, h - 1 - x))
    }

    /// Nearest-neighbour upscale by an integer factor.
    pub fn scale(&self, factor: u32) -> BinaryImage {
        BinaryImage::from_fn(self.width * factor, self.height * factor, |x, y| {
            self.get(x / factor, y / factor)
        })
    }

    /// One step of 4-neighbour erosion.
    pub fn eroded(&self) -> BinaryImage {
        BinaryImage::from_fn(self.width, self.height, |x, y| {
            let (x, y) = (x as i64, y as i64);
            self.get_signed(x, y)
                && self.get_signed(x - 1, y)
                && self.get_signed(x + 1, y)
                && self.get_signed(x, y - 1)
                && self.get_signed(x, y + 1)
        })
    }

    /// 4-neighbour dilation; the canvas grows by one pixel on every side.
    pub fn dilated(&self) -> BinaryImage {
        BinaryImage::from_fn(self.width + 2, self.height + 2, |x, y| {
            let (x, y) = (x as i64 - 1, y as i64 - 1);
            self.get_signed(x, y)
                || self.get_signed(x - 1, y)
                || self.get_signed(x + 1, y)
                || self.get_signed(x, y - 1)
                || self.get_signed(x, y + 1)
        })
    }

    /// Rotates about the image centre by `degrees` (clockwise, y down) with
    /// nearest-neighbour sampling. The canvas grows to hold the result.
    pub fn rotated(&self, degrees: f64) -> BinaryImage {
        if degrees == 0.0 {
            return self.clone();
        }
        let (sin, cos) = degrees.to_radians().sin_cos();
        let (w, h) = (self.width as f64, self.height as f64);
        let new_w = (w * cos.abs() + h * sin.abs()).ceil() as u32;
        let new_h = (w * sin.abs() + h * cos.abs()).ceil() as u32;
        let (cx, cy) = (w / 2.0, h / 2.0);
        let (ncx, ncy) = (new_w as f64 / 2.0, new_h as f64 / 2.0);
        BinaryImage::from_fn(new_w, new_h, |x, y| {
            let dx = x as f64 + 0.5 - ncx;
            let dy = y as f64 + 0.5 - ncy;
            // inverse rotation back into the source
            let sx = cos * dx + sin * dy + cx;
            let sy = -sin * dx + cos * dy + cy;
            self.get_signed(sx.floor() as i64, sy.floor() as i64)
        })
    }

    /// Grayscale rendering: ink black on white.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.bits.iter().map(|b| if *b { 0 } else { 255 }).collect(),
        }
    }

    /// Ink is any pixel darker than mid-gray.
    pub fn from_gray(img: &GrayImage) -> BinaryImage {
        BinaryImage {
            width: img.width,
            height: img.height,
            bits: img.pixels.iter().map(|p| *p < 128).collect(),
        }
    }
}

/// Simple vector drawing used by the sample-catalog generator and tests.
/// Coordinates are pixel centres in f64.
pub struct Canvas {
    image: BinaryImage,
}

impl Canvas {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            image: BinaryImage::new(width, height),
        }
    }

    pub fn into_image(self) -> BinaryImage {
        self.image
    }

    fn paint(&mut self, mut inside: impl FnMut(f64, f64) -> bool) {
        for y in 0..self.image.height {
            for x in 0..self.image.width {
                if inside(x as f64 + 0.5, y as f64 + 0.5) {
                    self.image.set(x, y, true);
                }
            }
        }
    }

    pub fn disc(&mut self, cx: f64, cy: f64, r: f64) {
        self.paint(|x, y| (x - cx).powi(2) + (y - cy).powi(2) <= r * r);
    }

    pub fn ring(&mut self, cx: f64, cy: f64, r_outer: f64, r_inner: f64) {
        self.paint(|x, y| {
            let d2 = (x - cx).powi(2) + (y - cy).powi(2);
            d2 <= r_outer * r_outer && d2 > r_inner * r_inner
        });
    }

    pub fn rect(&mut self, x0: f64, y0: f64, x1: f64, y1: f64) {
        self.paint(|x, y| x >= x0 && x < x1 && y >= y0 && y < y1);
    }

    /// Thick segment with round caps.
    pub fn line(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, thickness: f64) {
        let r = thickness / 2.0;
        let (dx, dy) = (x1 - x0, y1 - y0);
        let len2 = dx * dx + dy * dy;
        self.paint(|x, y| {
            let t = if len2 == 0.0 {
                0.0
            } else {
                (((x - x0) * dx + (y - y0) * dy) / len2).clamp(0.0, 1.0)
            };
            let (px, py) = (x0 + t * dx, y0 + t * dy);
            (x - px).powi(2) + (y - py).powi(2) <= r * r
        });
    }

    /// Filled polygon (even-odd rule).
    pub fn polygon(&mut self, points: &[(f64, f64)]) {
        let pts = points.to_vec();
        self.paint(|x, y| {
            let mut inside = false;
            let n = pts.len();
            for i in 0..n {
                let (xi, yi) = pts[i];
                let (xj, yj) = pts[(i + n - 1) % n];
                if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
                    inside = !inside;
                }
            }
            inside
        });
    }

    /// Arc of a thick circle between two angles (degrees, clockwise from +x).
    pub fn arc(&mut self, cx: f64, cy: f64, r: f64, from_deg: f64, to_deg: f64, thickness: f64) {
        let half = thickness / 2.0;
        let (lo, hi) = (from_deg.min(to_deg), from_deg.max(to_deg));
        self.paint(|x, y| {
            let d = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
            if (d - r).abs() > half {
                return false;
            }
            let mut a = (y - cy).atan2(x - cx).to_degrees();
            if a < lo {
                a += 360.0;
            }
            a >= lo && a <= hi
        });
    }
}
