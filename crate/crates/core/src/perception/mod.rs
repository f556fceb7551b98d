//! Visual perception layer: text grounding (OCR-style bounding boxes), icon
//! detection with indexed marks, and set-of-mark overlay rendering.
//!
//! Sim mode uses [`SceneGrounder`], which reads the ground-truth scene graph
//! so agent and engine correctness are isolated from OCR quality. The remote
//! clients in [`remote`] restore the real pipeline behind the same trait.

pub mod marks;
pub mod remote;
pub mod scene;

use serde::{Deserialize, Serialize};

use crate::geom::BBox;
use crate::sim::env::ScreenObservation;
use crate::sim::pack::ElementKind;

pub use marks::{annotate_marks, MarkedImage};
pub use remote::RemoteGrounder;
pub use scene::SceneGrounder;

#[derive(Debug, thiserror::Error)]
pub enum PerceptionError {
    #[error("text grounding requires a non-empty query")]
    EmptyQuery,
    #[error("observation carries no scene graph; the mock grounder only works in sim mode")]
    NoScene,
    #[error("grounding service unreachable: {0}")]
    Unreachable(String),
    #[error("grounding service timed out after {0:.1}s")]
    Timeout(f64),
    #[error("grounding service returned status {0}")]
    BadStatus(u16),
    #[error("grounding service payload malformed: {0}")]
    BadPayload(String),
}

/// What to ground: a text string via OCR, or icon candidates (query may be
/// empty for "detect all").
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundingQuery {
    pub kind: ElementKind,
    pub query: String,
}

/// One detection with its set-of-mark index (unique, contiguous from 1
/// within a detection result).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexedBBox {
    pub index: u32,
    pub bbox: BBox,
    pub kind: ElementKind,
    pub label: Option<String>,
}

/// The grounding interface both the mock and remote implementations satisfy.
/// Grounders are stateless and freely shareable.
pub trait Grounder {
    /// Bounding boxes of text elements matching `query`
    /// (case-insensitive substring match in the mock).
    fn ground_text(&self, obs: &ScreenObservation, query: &str)
        -> Result<Vec<BBox>, PerceptionError>;

    /// All icon candidates, indexed 1..n in row-major order
    /// (top-to-bottom, then left-to-right by bbox top-left corner).
    fn detect_icons(&self, obs: &ScreenObservation) -> Result<Vec<IndexedBBox>, PerceptionError>;
}

/// Center pixel of a bbox, rounded half-up per coordinate. This is the
/// contact point used for every grounded tap.
pub fn center_of(bbox: &BBox) -> (i32, i32) {
    let cx = (bbox.x_min as i64 + bbox.x_max as i64 + 1).div_euclid(2);
    let cy = (bbox.y_min as i64 + bbox.y_max as i64 + 1).div_euclid(2);
    (cx as i32, cy as i32)
}

/// Assign row-major set-of-mark indices to icon boxes.
pub fn index_row_major(mut boxes: Vec<(BBox, Option<String>)>) -> Vec<IndexedBBox> {
    boxes.sort_by_key(|(b, _)| (b.y_min, b.x_min));
    boxes
        .into_iter()
        .enumerate()
        .map(|(i, (bbox, label))| IndexedBBox {
            index: (i + 1) as u32,
            bbox,
            kind: ElementKind::Icon,
            label,
        })
        .collect()
}
