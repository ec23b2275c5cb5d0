use serde::{Deserialize, Serialize};

/// Axis-aligned box, `min` inclusive and `max` exclusive, y grows downward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BBox {
    pub min_x: i64,
    pub min_y: i64,
    pub max_x: i64,
    pub max_y: i64,
}

impl BBox {
    pub fn new(min_x: i64, min_y: i64, max_x: i64, max_y: i64) -> Self {
        debug_assert!(min_x <= max_x && min_y <= max_y);
        Self {
            min_x,
            min_y,
            max_x,
            max_y,
        }
    }

    pub fn pixel(x: i64, y: i64) -> Self {
        Self::new(x, y, x + 1, y + 1)
    }

    pub fn from_origin_size(x: i64, y: i64, width: i64, height: i64) -> Self {
        Self::new(x, y, x + width, y + height)
    }

    pub fn width(&self) -> i64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> i64 {
        self.max_y - self.min_y
    }

    pub fn area(&self) -> i64 {
        self.width() * self.height()
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox::new(
            self.min_x.min(other.min_x),
            self.min_y.min(other.min_y),
            self.max_x.max(other.max_x),
            self.max_y.max(other.max_y),
        )
    }

    pub fn translate(&self, dx: i64, dy: i64) -> BBox {
        BBox::new(self.min_x + dx, self.min_y + dy, self.max_x + dx, self.max_y + dy)
    }

    /// Number of empty pixel rows/columns separating the boxes along the
    /// axis where they are furthest apart; 0 when they touch or overlap.
    pub fn gap(&self, other: &BBox) -> i64 {
        let gx = (other.min_x - self.max_x).max(self.min_x - other.max_x);
        let gy = (other.min_y - self.max_y).max(self.min_y - other.max_y);
        gx.max(gy).max(0)
    }

    pub fn contains_box(&self, other: &BBox) -> bool {
        other.min_x >= self.min_x
            && other.min_y >= self.min_y
            && other.max_x <= self.max_x
            && other.max_y <= self.max_y
    }

    pub fn overlaps_x(&self, other: &BBox) -> bool {
        self.min_x < other.max_x && other.min_x < self.max_x
    }

    pub fn center(&self) -> (f64, f64) {
        (
            (self.min_x + self.max_x) as f64 / 2.0,
            (self.min_y + self.max_y) as f64 / 2.0,
        )
    }
}
