//! Grouping recognized glyphs into columns and signs.

use serde::{Deserialize, Serialize};

use crate::geometry::BBox;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentConfig {
    /// Glyphs whose x-extents come within this many pixels share a column.
    pub column_tolerance: i64,
    /// A vertical gap above `gap_multiplier × median gap` starts a new sign…
    pub gap_multiplier: f64,
    /// …clamped to `[min_split_gap, max_split_gap]` so that pages of
    /// one-glyph signs (median gap = sign gap) and pages of tightly packed
    /// signs (median gap = 0) both split sensibly.
    pub min_split_gap: i64,
    pub max_split_gap: i64,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        Self {
            column_tolerance: 16,
            gap_multiplier: 1.5,
            min_split_gap: 16,
            max_split_gap: 30,
        }
    }
}

/// Columns (left to right) of signs (top to bottom) of glyph indices into
/// `boxes`.
pub type Segmentation = Vec<Vec<Vec<usize>>>;

pub fn segment_signs(boxes: &[BBox], config: &SegmentConfig) -> Segmentation {
    let columns = split_columns(boxes, config.column_tolerance);
    let mut gaps = Vec::new();
    let mut stacks = Vec::new();
    for column in columns {
        let mut members = column;
        members.sort_by_key(|&i| (boxes[i].min_y, boxes[i].min_x, i));
        let mut column_gaps = Vec::new();
        let mut bottom = i64::MIN;
        for (k, &i) in members.iter().enumerate() {
            if k > 0 {
                column_gaps.push((boxes[i].min_y - bottom).max(0));
            }
            bottom = bottom.max(boxes[i].max_y);
        }
        gaps.extend_from_slice(&column_gaps);
        stacks.push((members, column_gaps));
    }
    let threshold = split_threshold(&mut gaps, config);
    stacks
        .into_iter()
        .map(|(members, column_gaps)| {
            let mut signs: Vec<Vec<usize>> = Vec::new();
            for (k, &i) in members.iter().enumerate() {
                if k == 0 || column_gaps[k - 1] > threshold {
                    signs.push(Vec::new());
                }
                signs.last_mut().expect("sign started").push(i);
            }
            signs
        })
        .collect()
}

fn split_threshold(gaps: &mut [i64], config: &SegmentConfig) -> i64 {
    if gaps.is_empty() {
        return config.max_split_gap;
    }
    gaps.sort_unstable();
    let mid = gaps.len() / 2;
    let median = if gaps.len() % 2 == 1 {
        gaps[mid] as f64
    } else {
        (gaps[mid - 1] + gaps[mid]) as f64 / 2.0
    };
    ((config.gap_multiplier * median).round() as i64).clamp(config.min_split_gap, config.max_split_gap.max(config.min_split_gap))
}

/// Merges overlapping x-intervals (with tolerance) into columns ordered
/// left to right.
fn split_columns(boxes: &[BBox], tolerance: i64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by_key(|&i| (boxes[i].min_x, boxes[i].max_x, i));
    let mut columns: Vec<Vec<usize>> = Vec::new();
    let mut right = i64::MIN;
    for i in order {
        if columns.is_empty() || boxes[i].min_x > right.saturating_add(tolerance) {
            columns.push(Vec::new());
            right = boxes[i].max_x;
        }
        right = right.max(boxes[i].max_x);
        columns.last_mut().expect("column started").push(i);
    }
    columns
}
