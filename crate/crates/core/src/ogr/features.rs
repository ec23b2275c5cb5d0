//! Shape measurements of a glyph candidate.

use serde::{Deserialize, Serialize};

use super::extract_components;
use crate::raster::BinaryImage;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub width: u32,
    pub height: u32,
    pub area: usize,
    pub fill_ratio: f64,
    pub blob_count: usize,
    pub hole_count: usize,
    /// Crack length: number of ink pixel edges facing background.
    pub perimeter: usize,
    /// `perimeter² / area`; rotation-stable and scale-free.
    pub compactness: f64,
    pub endpoints: usize,
    pub junctions: usize,
    /// Principal-axis angle in degrees, `(-90, 90]`, y down.
    pub orientation: f64,
    pub eccentricity: f64,
    /// Overlap with the left-right mirror image, in `[0, 1]`.
    pub symmetry_h: f64,
    /// Overlap with the top-bottom mirror image, in `[0, 1]`.
    pub symmetry_v: f64,
}

pub fn extract_features(mask: &BinaryImage) -> FeatureVector {
    let mask = mask.trimmed();
    let area = mask.count();
    let (w, h) = (mask.width(), mask.height());
    let blob_count = extract_components(&mask, 1).len();
    let euler = euler_number(&mask);
    let perimeter = crack_perimeter(&mask);
    let skeleton = zhang_suen(&mask);
    let (endpoints, junctions) = skeleton_nodes(&skeleton);
    let (orientation, eccentricity) = moments(&mask);
    FeatureVector {
        width: w,
        height: h,
        area,
        fill_ratio: if area == 0 { 0.0 } else { area as f64 / (w as f64 * h as f64) },
        blob_count,
        hole_count: (blob_count as i64 - euler).max(0) as usize,
        perimeter,
        compactness: if area == 0 { 0.0 } else { (perimeter * perimeter) as f64 / area as f64 },
        endpoints,
        junctions,
        orientation,
        eccentricity,
        symmetry_h: mirror_overlap(&mask, true),
        symmetry_v: mirror_overlap(&mask, false),
    }
}

/// Euler number under 8-connectivity from 2×2 bit-quad counts.
pub fn euler_number(mask: &BinaryImage) -> i64 {
    let (mut q1, mut q3, mut qd) = (0i64, 0i64, 0i64);
    for y in -1..mask.height() as i64 {
        for x in -1..mask.width() as i64 {
            let a = mask.get_signed(x, y);
            let b = mask.get_signed(x + 1, y);
            let c = mask.get_signed(x, y + 1);
            let d = mask.get_signed(x + 1, y + 1);
            match a as u8 + b as u8 + c as u8 + d as u8 {
                1 => q1 += 1,
                3 => q3 += 1,
                2 if a == d => qd += 1,
                _ => {}
            }
        }
    }
    (q1 - q3 - 2 * qd) / 4
}

pub fn crack_perimeter(mask: &BinaryImage) -> usize {
    let mut n = 0;
    for y in 0..mask.height() as i64 {
        for x in 0..mask.width() as i64 {
            if mask.get_signed(x, y) {
                n += [(1, 0), (-1, 0), (0, 1), (0, -1)]
                    .iter()
                    .filter(|(dx, dy)| !mask.get_signed(x + dx, y + dy))
                    .count();
            }
        }
    }
    n
}

const RING: [(i64, i64); 8] = [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];

/// Zhang–Suen thinning.
pub fn zhang_suen(mask: &BinaryImage) -> BinaryImage {
    let mut img = mask.clone();
    loop {
        let mut changed = false;
        for pass in 0..2 {
            let mut clear = Vec::new();
            for y in 0..img.height() as i64 {
                for x in 0..img.width() as i64 {
                    if !img.get_signed(x, y) {
                        continue;
                    }
                    let p: Vec<bool> = RING.iter().map(|(dx, dy)| img.get_signed(x + dx, y + dy)).collect();
                    let b = p.iter().filter(|v| **v).count();
                    let a = (0..8).filter(|&i| !p[i] && p[(i + 1) % 8]).count();
                    // p[0]=N p[2]=E p[4]=S p[6]=W
                    let cond = if pass == 0 {
                        !(p[0] && p[2] && p[4]) && !(p[2] && p[4] && p[6])
                    } else {
                        !(p[0] && p[2] && p[6]) && !(p[0] && p[4] && p[6])
                    };
                    if (2..=6).contains(&b) && a == 1 && cond {
                        clear.push((x, y));
                    }
                }
            }
            changed |= !clear.is_empty();
            for (x, y) in clear {
                img.set_signed(x, y, false);
            }
        }
        if !changed {
            return img;
        }
    }
}

fn skeleton_nodes(skeleton: &BinaryImage) -> (usize, usize) {
    let (mut ends, mut joins) = (0, 0);
    for y in 0..skeleton.height() as i64 {
        for x in 0..skeleton.width() as i64 {
            if !skeleton.get_signed(x, y) {
                continue;
            }
            let p: Vec<bool> = RING.iter().map(|(dx, dy)| skeleton.get_signed(x + dx, y + dy)).collect();
            // crossing number: transitions around the ring
            let crossings = (0..8).filter(|&i| !p[i] && p[(i + 1) % 8]).count();
            let neighbours = p.iter().filter(|v| **v).count();
            if neighbours == 1 {
                ends += 1;
            } else if crossings >= 3 {
                joins += 1;
            }
        }
    }
    (ends, joins)
}

fn moments(mask: &BinaryImage) -> (f64, f64) {
    let (mut n, mut sx, mut sy) = (0f64, 0f64, 0f64);
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) {
                n += 1.0;
                sx += x as f64;
                sy += y as f64;
            }
        }
    }
    if n == 0.0 {
        return (0.0, 0.0);
    }
    let (cx, cy) = (sx / n, sy / n);
    let (mut m20, mut m02, mut m11) = (0f64, 0f64, 0f64);
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                m20 += dx * dx;
                m02 += dy * dy;
                m11 += dx * dy;
            }
        }
    }
    let mut angle = 0.5 * (2.0 * m11).atan2(m20 - m02).to_degrees();
    if angle <= -90.0 {
        angle += 180.0;
    }
    let common = ((m20 - m02).powi(2) + 4.0 * m11 * m11).sqrt();
    let (l1, l2) = ((m20 + m02 + common) / 2.0, (m20 + m02 - common) / 2.0);
    let ecc = if l1 <= 0.0 { 0.0 } else { (1.0 - (l2 / l1).max(0.0)).sqrt() };
    (angle, ecc)
}

fn mirror_overlap(mask: &BinaryImage, horizontal: bool) -> f64 {
    let (w, h) = (mask.width(), mask.height());
    let (mut inter, mut union) = (0usize, 0usize);
    for y in 0..h {
        for x in 0..w {
            let a = mask.get(x, y);
            let b = if horizontal { mask.get(w - 1 - x, y) } else { mask.get(x, h - 1 - y) };
            inter += (a && b) as usize;
            union += (a || b) as usize;
        }
    }
    if union == 0 { 1.0 } else { inter as f64 / union as f64 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Canvas;
    use proptest::prelude::*;

    /// Holes as background regions (4-connected) that never reach the
    /// padded border.
    fn holes_by_flood_fill(mask: &BinaryImage) -> usize {
        let (w, h) = (mask.width() as i64 + 2, mask.height() as i64 + 2);
        let ink = |x: i64, y: i64| mask.get_signed(x - 1, y - 1);
        let mut seen = vec![false; (w * h) as usize];
        let mut regions = 0;
        for sy in 0..h {
            for sx in 0..w {
                if ink(sx, sy) || seen[(sy * w + sx) as usize] {
                    continue;
                }
                regions += 1;
                let mut stack = vec![(sx, sy)];
                seen[(sy * w + sx) as usize] = true;
                while let Some((x, y)) = stack.pop() {
                    for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                        let (nx, ny) = (x + dx, y + dy);
                        if nx >= 0 && ny >= 0 && nx < w && ny < h && !ink(nx, ny) && !seen[(ny * w + nx) as usize] {
                            seen[(ny * w + nx) as usize] = true;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
        }
        regions - 1
    }

    #[test]
    fn ring_has_one_hole_disc_none() {
        let mut c = Canvas::new(30, 30);
        c.ring(15.0, 15.0, 12.0, 7.0);
        let f = extract_features(&c.into_image());
        assert_eq!((f.blob_count, f.hole_count), (1, 1));
        assert!(f.symmetry_h > 0.95 && f.symmetry_v > 0.95);

        let mut c = Canvas::new(30, 30);
        c.disc(15.0, 15.0, 10.0);
        assert_eq!(extract_features(&c.into_image()).hole_count, 0);
    }

    #[test]
    fn figure_eight_has_two_holes() {
        let img = BinaryImage::from_ascii(
            "#####
             #.#.#
             #####",
        );
        assert_eq!(extract_features(&img).hole_count, 2);
    }

    #[test]
    fn bar_skeleton_has_two_ends_and_horizontal_axis() {
        let mut c = Canvas::new(40, 12);
        c.rect(2.0, 3.0, 38.0, 8.0);
        let f = extract_features(&c.into_image());
        assert_eq!(f.endpoints, 2);
        assert_eq!(f.junctions, 0);
        assert!(f.orientation.abs() < 1.0);
        assert!(f.eccentricity > 0.9);
    }

    #[test]
    fn plus_sign_has_a_junction() {
        let mut c = Canvas::new(31, 31);
        c.rect(13.0, 2.0, 18.0, 29.0);
        c.rect(2.0, 13.0, 29.0, 18.0);
        let f = extract_features(&c.into_image());
        assert!(f.junctions >= 1);
        assert_eq!(f.endpoints, 4);
    }

    #[test]
    fn perimeter_of_square() {
        let img = BinaryImage::from_fn(5, 5, |_, _| true);
        let f = extract_features(&img);
        assert_eq!(f.perimeter, 20);
        assert!((f.compactness - 16.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn euler_holes_match_flood_fill(bits in prop::collection::vec(any::<bool>(), 64)) {
            let img = BinaryImage::from_fn(8, 8, |x, y| bits[(y * 8 + x) as usize]);
            let comps = extract_components(&img, 1).len() as i64;
            let holes = holes_by_flood_fill(&img) as i64;
            prop_assert_eq!(euler_number(&img), comps - holes);
        }

        #[test]
        fn quarter_turn_keeps_topology(bits in prop::collection::vec(any::<bool>(), 48)) {
            let img = BinaryImage::from_fn(8, 6, |x, y| bits[(y * 8 + x) as usize]);
            if img.count() > 0 {
                let a = extract_features(&img);
                let b = extract_features(&img.rotate90());
                prop_assert_eq!(a.hole_count, b.hole_count);
                prop_assert_eq!(a.blob_count, b.blob_count);
                prop_assert_eq!(a.perimeter, b.perimeter);
                prop_assert_eq!(a.area, b.area);
            }
        }
    }
}
