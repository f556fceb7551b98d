//! Touch traces and gesture classification.
//!
//! Classification is purely geometric and total: every valid trace lands in
//! exactly one of tap, swipe(direction), back gesture, exit gesture, or
//! noise. Thresholds:
//!
//! * tap: net contact displacement < 2% of min(W, H)
//! * back: first contact at x <= 5% of W with rightward displacement >= 25% of W
//! * exit: first contact at y >= 90% of H with upward displacement >= 30% of H
//! * otherwise: swipe along the dominant displacement axis
//!
//! Back/exit take precedence over the generic swipe, back before exit.

use serde::{Deserialize, Serialize};

use crate::geom::{Direction, PxPoint, ScreenDims};

/// One sampled finger position. `contact` is true while the finger touches
/// the glass; hover samples carry spatial context only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TouchSample {
    pub point: PxPoint,
    pub contact: bool,
    pub time_offset_ms: f64,
}

/// An ordered sequence of touch samples with strictly increasing time
/// offsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TouchTrace {
    pub samples: Vec<TouchSample>,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("trace has no samples")]
    Empty,
    #[error("trace time offsets must strictly increase (sample {0})")]
    NonMonotonicTime(usize),
    #[error("trace sample {index} at ({x:.1}, {y:.1}) is outside screen bounds {w}x{h}")]
    OutOfBounds {
        index: usize,
        x: f64,
        y: f64,
        w: u32,
        h: u32,
    },
}

impl TouchTrace {
    pub fn new(samples: Vec<TouchSample>) -> Self {
        Self { samples }
    }

    /// A single-contact tap trace at `p` (one landing sample plus lift).
    pub fn tap(p: PxPoint) -> Self {
        Self::new(vec![
            TouchSample {
                point: p,
                contact: true,
                time_offset_ms: 0.0,
            },
            TouchSample {
                point: p,
                contact: false,
                time_offset_ms: 80.0,
            },
        ])
    }

    /// A straight contact path from `a` to `b` with `steps` samples.
    pub fn swipe_line(a: PxPoint, b: PxPoint, steps: usize) -> Self {
        let steps = steps.max(2);
        let mut samples = Vec::with_capacity(steps);
        for i in 0..steps {
            let t = i as f64 / (steps - 1) as f64;
            samples.push(TouchSample {
                point: PxPoint::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t),
                contact: true,
                time_offset_ms: i as f64,
            });
        }
        Self::new(samples)
    }

    /// Check structural validity against a screen.
    pub fn validate(&self, dims: ScreenDims) -> Result<(), TraceError> {
        if self.samples.is_empty() {
            return Err(TraceError::Empty);
        }
        let mut last = f64::NEG_INFINITY;
        for (i, s) in self.samples.iter().enumerate() {
            if s.time_offset_ms <= last {
                return Err(TraceError::NonMonotonicTime(i));
            }
            last = s.time_offset_ms;
            if !dims.contains(s.point) {
                return Err(TraceError::OutOfBounds {
                    index: i,
                    x: s.point.x,
                    y: s.point.y,
                    w: dims.width,
                    h: dims.height,
                });
            }
        }
        Ok(())
    }

    pub fn contact_samples(&self) -> impl Iterator<Item = &TouchSample> {
        self.samples.iter().filter(|s| s.contact)
    }
}

/// Result of geometric classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GestureClass {
    Tap { at: PxPoint },
    Swipe { direction: Direction },
    BackGesture,
    ExitGesture,
    /// No contact samples: nothing touched the screen.
    Noise,
}

/// Fraction of min(W, H) under which a trace counts as a tap.
pub const TAP_MAX_DISPLACEMENT_FRAC: f64 = 0.02;
/// Back gesture: start-x bound and required rightward travel, fractions of W.
pub const BACK_START_X_FRAC: f64 = 0.05;
pub const BACK_MIN_DX_FRAC: f64 = 0.25;
/// Exit gesture: start-y bound and required upward travel, fractions of H.
pub const EXIT_START_Y_FRAC: f64 = 0.90;
pub const EXIT_MIN_DY_FRAC: f64 = 0.30;

/// Classify a (pre-validated) trace.
pub fn classify(trace: &TouchTrace, dims: ScreenDims) -> GestureClass {
    let mut contacts = trace.contact_samples();
    let first = match contacts.next() {
        Some(s) => *s,
        None => return GestureClass::Noise,
    };
    let last = contacts.last().copied().unwrap_or(first);

    let dx = last.point.x - first.point.x;
    let dy = last.point.y - first.point.y;
    let net = (dx * dx + dy * dy).sqrt();

    let w = dims.width as f64;
    let h = dims.height as f64;

    if net < TAP_MAX_DISPLACEMENT_FRAC * dims.min_side() as f64 {
        return GestureClass::Tap { at: first.point };
    }
    if first.point.x <= BACK_START_X_FRAC * w && dx >= BACK_MIN_DX_FRAC * w {
        return GestureClass::BackGesture;
    }
    if first.point.y >= EXIT_START_Y_FRAC * h && -dy >= EXIT_MIN_DY_FRAC * h {
        return GestureClass::ExitGesture;
    }
    let direction = if dx.abs() >= dy.abs() {
        if dx >= 0.0 {
            Direction::Right
        } else {
            Direction::Left
        }
    } else if dy >= 0.0 {
        Direction::Down
    } else {
        Direction::Up
    };
    GestureClass::Swipe { direction }
}
