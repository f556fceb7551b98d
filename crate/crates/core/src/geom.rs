//! Shared pixel-space geometry: points, rectangles, screen dimensions.

use serde::{Deserialize, Serialize};

/// A pixel-space point with sub-pixel precision. Touch traces and planned
/// contact points live in this space; the simulator hit-tests against it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PxPoint {
    pub x: f64,
    pub y: f64,
}

impl PxPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, other: &PxPoint) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

impl From<(i32, i32)> for PxPoint {
    fn from((x, y): (i32, i32)) -> Self {
        Self::new(x as f64, y as f64)
    }
}

/// Axis-aligned pixel rectangle, inclusive min corner, exclusive semantics
/// are not assumed: `contains` treats both edges as inside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub x_min: i32,
    pub y_min: i32,
    pub x_max: i32,
    pub y_max: i32,
}

impl BBox {
    pub fn new(x_min: i32, y_min: i32, x_max: i32, y_max: i32) -> Self {
        Self {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    /// Degenerate boxes (zero or negative extent) are invalid everywhere in
    /// this crate.
    pub fn is_valid(&self) -> bool {
        self.x_min < self.x_max && self.y_min < self.y_max
    }

    pub fn contains(&self, p: PxPoint) -> bool {
        p.x >= self.x_min as f64
            && p.x <= self.x_max as f64
            && p.y >= self.y_min as f64
            && p.y <= self.y_max as f64
    }

    pub fn contains_box(&self, other: &BBox) -> bool {
        self.x_min <= other.x_min
            && self.y_min <= other.y_min
            && self.x_max >= other.x_max
            && self.y_max >= other.y_max
    }

    pub fn width(&self) -> i32 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> i32 {
        self.y_max - self.y_min
    }
}

/// Screen size in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenDims {
    pub width: u32,
    pub height: u32,
}

impl ScreenDims {
    pub fn new(width: u32, height: u32) -> Self {
        Self { width, height }
    }

    pub fn contains(&self, p: PxPoint) -> bool {
        p.x >= 0.0 && p.y >= 0.0 && p.x < self.width as f64 && p.y < self.height as f64
    }

    pub fn contains_box(&self, b: &BBox) -> bool {
        b.x_min >= 0 && b.y_min >= 0 && b.x_max <= self.width as i32 && b.y_max <= self.height as i32
    }

    pub fn min_side(&self) -> u32 {
        self.width.min(self.height)
    }
}

/// Swipe direction on screen. `Up` means the finger moves toward y = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::Left => "left",
            Direction::Right => "right",
        };
        write!(f, "{s}")
    }
}

/// Round half away from zero, matching the crate-wide pixel rounding rule.
pub fn round_half_up(v: f64) -> i32 {
    v.round() as i32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bbox_validity() {
        assert!(BBox::new(0, 0, 10, 10).is_valid());
        assert!(!BBox::new(10, 0, 10, 10).is_valid());
        assert!(!BBox::new(0, 12, 10, 10).is_valid());
    }

    #[test]
    fn dims_contain_half_open() {
        let d = ScreenDims::new(100, 200);
        assert!(d.contains(PxPoint::new(0.0, 0.0)));
        assert!(d.contains(PxPoint::new(99.9, 199.9)));
        assert!(!d.contains(PxPoint::new(100.0, 10.0)));
        assert!(!d.contains(PxPoint::new(10.0, -0.1)));
    }
}
