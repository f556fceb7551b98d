//! Swipe endpoint resolution and the back/exit gesture templates.
//!
//! Swipe distances are the screen-fraction constants short = 1/4,
//! medium = 1/3, long = 1/2 of the width (left/right) or height (up/down).
//! Endpoints that would leave the screen are an error, never a clamp.

use serde::{Deserialize, Serialize};

use crate::action::ActionError;
use crate::geom::{round_half_up, Direction, PxPoint, ScreenDims};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwipeDistance {
    Short,
    Medium,
    Long,
}

impl SwipeDistance {
    pub fn fraction(&self) -> f64 {
        match self {
            SwipeDistance::Short => 1.0 / 4.0,
            SwipeDistance::Medium => 1.0 / 3.0,
            SwipeDistance::Long => 1.0 / 2.0,
        }
    }
}

impl std::fmt::Display for SwipeDistance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SwipeDistance::Short => "short",
            SwipeDistance::Medium => "medium",
            SwipeDistance::Long => "long",
        };
        write!(f, "{s}")
    }
}

/// Resolve a swipe action's endpoints. The displaced axis moves by exactly
/// fraction * dims; the orthogonal coordinate is unchanged.
pub fn resolve_swipe(
    x: i32,
    y: i32,
    direction: Direction,
    distance: SwipeDistance,
    dims: ScreenDims,
) -> Result<(PxPoint, PxPoint), ActionError> {
    if x < 0 || y < 0 || x >= dims.width as i32 || y >= dims.height as i32 {
        return Err(ActionError::CoordsOutOfBounds {
            x,
            y,
            w: dims.width,
            h: dims.height,
        });
    }
    let start = PxPoint::new(x as f64, y as f64);
    let frac = distance.fraction();
    let (dx, dy) = match direction {
        Direction::Left => (-frac * dims.width as f64, 0.0),
        Direction::Right => (frac * dims.width as f64, 0.0),
        Direction::Up => (0.0, -frac * dims.height as f64),
        Direction::Down => (0.0, frac * dims.height as f64),
    };
    let end = PxPoint::new(start.x + dx, start.y + dy);
    if !dims.contains(end) {
        return Err(ActionError::SwipeEndOutOfBounds {
            x: end.x,
            y: end.y,
            w: dims.width,
            h: dims.height,
        });
    }
    Ok((start, end))
}

/// Back gesture template: a rightward drag starting at the left screen edge,
/// (0.02W, 0.5H) -> (0.35W, 0.5H), rounded to whole pixels.
pub fn synthesize_back(dims: ScreenDims) -> (PxPoint, PxPoint) {
    let w = dims.width as f64;
    let h = dims.height as f64;
    let start = PxPoint::new(
        round_half_up(0.02 * w) as f64,
        round_half_up(0.5 * h) as f64,
    );
    let end = PxPoint::new(
        round_half_up(0.35 * w) as f64,
        round_half_up(0.5 * h) as f64,
    );
    (start, end)
}

/// Exit gesture template: an upward drag from the bottom edge,
/// (0.5W, 0.98H) -> (0.5W, 0.55H), rounded to whole pixels.
pub fn synthesize_exit(dims: ScreenDims) -> (PxPoint, PxPoint) {
    let w = dims.width as f64;
    let h = dims.height as f64;
    let start = PxPoint::new(
        round_half_up(0.5 * w) as f64,
        round_half_up(0.98 * h) as f64,
    );
    let end = PxPoint::new(
        round_half_up(0.5 * w) as f64,
        round_half_up(0.55 * h) as f64,
    );
    (start, end)
}
