//! Set-of-mark overlay: deterministic index badges stamped onto a raster so
//! the policy can answer with an icon index instead of raw coordinates.

use serde::{Deserialize, Serialize};

use crate::blob::{BlobRef, RasterImage};
use crate::perception::IndexedBBox;

/// Side length of the square index badge drawn at each bbox's top-left.
pub const BADGE_SIZE: u32 = 12;

/// A raster annotated with indexed marks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkedImage {
    pub raster_ref: BlobRef,
    pub marks: Vec<IndexedBBox>,
}

/// Badge fill color for an index. Encodes the index in the green channel so
/// tests (and debugging humans) can decode the overlay.
pub fn badge_color(index: u32) -> [u8; 3] {
    [230, (index % 256) as u8, 25]
}

/// Stamp index badges onto a copy of `raster`. Deterministic: identical
/// inputs produce an identical output raster (and therefore identical ref).
pub fn annotate_marks(raster: &RasterImage, detections: &[IndexedBBox]) -> (RasterImage, MarkedImage) {
    let mut out = raster.clone();
    for d in detections {
        let x0 = d.bbox.x_min;
        let y0 = d.bbox.y_min;
        out.fill_rect(
            x0,
            y0,
            x0 + BADGE_SIZE as i32,
            y0 + BADGE_SIZE as i32,
            badge_color(d.index),
        );
    }
    let marked = MarkedImage {
        raster_ref: out.blob_ref(),
        marks: detections.to_vec(),
    };
    (out, marked)
}
