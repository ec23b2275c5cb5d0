//! Grayscale to ink mask.

use serde::{Deserialize, Serialize};

use super::OgrError;
use crate::raster::{BinaryImage, GrayImage};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Binarization {
    /// Threshold picked by maximizing between-class variance.
    #[default]
    Otsu,
    /// Pixels strictly darker than `threshold` are ink.
    Fixed { threshold: u8 },
}

/// Otsu threshold: pixels `<= t` form the dark class. `None` when the image
/// holds a single intensity.
pub fn otsu_threshold(img: &GrayImage) -> Option<u8> {
    let mut hist = [0u64; 256];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    let total: u64 = hist.iter().sum();
    let sum_all: f64 = hist.iter().enumerate().map(|(i, &n)| i as f64 * n as f64).sum();
    let (mut weight_dark, mut sum_dark) = (0u64, 0f64);
    let mut best: Option<(f64, u8)> = None;
    for t in 0..255usize {
        weight_dark += hist[t];
        sum_dark += t as f64 * hist[t] as f64;
        if weight_dark == 0 || weight_dark == total {
            continue;
        }
        let weight_light = total - weight_dark;
        let mean_dark = sum_dark / weight_dark as f64;
        let mean_light = (sum_all - sum_dark) / weight_light as f64;
        let between = weight_dark as f64 * weight_light as f64 * (mean_dark - mean_light).powi(2);
        if best.is_none_or(|(b, _)| between > b) {
            best = Some((between, t as u8));
        }
    }
    best.map(|(_, t)| t)
}

/// Splits the page into ink and background.
///
/// With `auto_polarity` the minority class is taken as ink, so light
/// writing on a dark page gives the same mask as dark on light. A page of a
/// single light intensity is blank; a single dark or mid intensity with no
/// fixed threshold is `DegenerateImage`.
pub fn binarize(page: &GrayImage, method: Binarization, auto_polarity: bool) -> Result<BinaryImage, OgrError> {
    let dark_is_ink = |threshold: u8| {
        BinaryImage::from_fn(page.width(), page.height(), |x, y| page.get(x, y) < threshold)
    };
    let mask = match method {
        Binarization::Fixed { threshold } => dark_is_ink(threshold),
        Binarization::Otsu => match otsu_threshold(page) {
            Some(t) => dark_is_ink(t.saturating_add(1)),
            None => {
                return if page.pixels()[0] >= 128 {
                    Ok(BinaryImage::new(page.width(), page.height()))
                } else {
                    Err(OgrError::DegenerateImage)
                };
            }
        },
    };
    if auto_polarity && mask.count() * 2 > page.pixels().len() {
        return Ok(BinaryImage::from_fn(mask.width(), mask.height(), |x, y| !mask.get(x, y)));
    }
    Ok(mask)
}
