//! Mock grounder over the simulator's ground-truth scene graph.

use crate::geom::BBox;
use crate::perception::{index_row_major, Grounder, IndexedBBox, PerceptionError};
use crate::sim::env::ScreenObservation;
use crate::sim::pack::ElementKind;

/// Deterministic grounder for sim observations. Text queries match scene
/// labels by case-insensitive substring; icon detection returns every icon
/// element in row-major index order.
#[derive(Debug, Clone, Copy, Default)]
pub struct SceneGrounder;

impl Grounder for SceneGrounder {
    fn ground_text(
        &self,
        obs: &ScreenObservation,
        query: &str,
    ) -> Result<Vec<BBox>, PerceptionError> {
        if query.is_empty() {
            return Err(PerceptionError::EmptyQuery);
        }
        let scene = obs.scene.as_ref().ok_or(PerceptionError::NoScene)?;
        let needle = query.to_lowercase();
        Ok(scene
            .iter()
            .filter(|e| e.kind == ElementKind::Text && e.label.to_lowercase().contains(&needle))
            .map(|e| e.bbox)
            .collect())
    }

    fn detect_icons(&self, obs: &ScreenObservation) -> Result<Vec<IndexedBBox>, PerceptionError> {
        let scene = obs.scene.as_ref().ok_or(PerceptionError::NoScene)?;
        Ok(index_row_major(
            scene
                .iter()
                .filter(|e| e.kind == ElementKind::Icon)
                .map(|e| (e.bbox, Some(e.label.clone())))
                .collect(),
        ))
    }
}
