//! Episode files: the ten-attribute step records, metadata, recording, and
//! human correctness annotation.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::blob::{BlobRef, BlobStore, RasterImage};
use crate::dataset::{DatasetError, TerminalStatus, EPISODE_VERSION};
use crate::perception::IndexedBBox;
use crate::sim::env::ScreenObservation;

/// One detected element as stored in an episode step. Coordinates are
/// (x_min, y_min, x_max, y_max).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordedBox {
    pub index: u32,
    pub bbox: [i32; 4],
    pub label: Option<String>,
}

/// One step in the ten-attribute schema. Every field serializes under its
/// attribute key even when unset (null), so schema checks are structural.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeStep {
    /// Screenshot of the smartphone display (content-addressed).
    pub screenshot: BlobRef,
    /// Task instruction provided by the user.
    pub instruction: String,
    /// Agent's observation of the current screen state.
    pub observation: String,
    /// Agent's reasoning for the step.
    pub thought: String,
    /// Abstract action decided by the agent, e.g. "tap (176, 1450)".
    pub action: String,
    /// Hardware action(s) executed by the arm, one line per trajectory,
    /// e.g. "tap at (176, 1450)".
    pub action_hardware: String,
    /// Bounding boxes of interactive elements detected this step.
    pub gui_bboxes: Vec<RecordedBox>,
    /// Per-box element type ("icon" or "text"), parallel to `gui_bboxes`.
    pub bbox_type: Vec<String>,
    /// Whether the step was performed correctly (null until annotated).
    pub is_step_correct: Option<bool>,
    /// Whether the overall task succeeded; non-null only on the final step.
    pub is_final_success: Option<bool>,
}

/// One annotation overwrite, kept for audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub step: usize,
    pub attribute: String,
    pub old: serde_json::Value,
    pub new: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMeta {
    pub task_id: String,
    pub device_id: String,
    pub seed: u64,
    /// True when all recorded times are episode-relative (no wall clock),
    /// which is what makes byte-identity across runs possible.
    pub timestamps_normalized: bool,
    pub terminal_status: TerminalStatus,
    #[serde(default)]
    pub audit: Vec<AuditEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeFile {
    pub episode_version: u32,
    pub metadata: EpisodeMeta,
    pub steps: Vec<EpisodeStep>,
}

impl EpisodeFile {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DatasetError> {
        fs::write(path, self.to_json_bytes())?;
        Ok(())
    }

    /// Canonical serialized form (pretty JSON with a trailing newline).
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("episode serializes");
        bytes.push(b'\n');
        bytes
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DatasetError> {
        let raw = fs::read_to_string(path)?;
        serde_json::from_str(&raw).map_err(|e| DatasetError::Format(e.to_string()))
    }
}

/// Inputs for recording one executed step.
pub struct StepInputs<'a> {
    /// The pre-action observation the agent acted on.
    pub observation: &'a ScreenObservation,
    /// Raster bytes of that observation, stored into the blob directory
    /// when the recorder has one.
    pub raster: Option<&'a RasterImage>,
    pub instruction: &'a str,
    pub observation_text: &'a str,
    pub thought: &'a str,
    pub action_abstract: String,
    /// Hardware grammar lines; empty means no hardware ran ("noop").
    pub hardware_lines: Vec<String>,
    pub detections: &'a [IndexedBBox],
}

/// Accumulates steps for one episode. One writer per episode file.
pub struct EpisodeRecorder {
    task_id: String,
    device_id: String,
    seed: u64,
    steps: Vec<EpisodeStep>,
    blobs: Option<BlobStore>,
}

impl EpisodeRecorder {
    pub fn new(task_id: &str, device_id: &str, seed: u64, blobs: Option<BlobStore>) -> Self {
        Self {
            task_id: task_id.to_string(),
            device_id: device_id.to_string(),
            seed,
            steps: Vec::new(),
            blobs,
        }
    }

    /// Record one step, populating all ten attributes from the live
    /// objects.
    pub fn record_step(&mut self, inputs: StepInputs<'_>) -> Result<&EpisodeStep, DatasetError> {
        if let (Some(store), Some(raster)) = (&self.blobs, inputs.raster) {
            store.put(&raster.to_ppm())?;
        }
        let action_hardware = if inputs.hardware_lines.is_empty() {
            "noop".to_string()
        } else {
            inputs.hardware_lines.join("\n")
        };
        let step = EpisodeStep {
            screenshot: inputs.observation.raster_ref.clone(),
            instruction: inputs.instruction.to_string(),
            observation: inputs.observation_text.to_string(),
            thought: inputs.thought.to_string(),
            action: inputs.action_abstract,
            action_hardware,
            gui_bboxes: inputs
                .detections
                .iter()
                .map(|d| RecordedBox {
                    index: d.index,
                    bbox: [d.bbox.x_min, d.bbox.y_min, d.bbox.x_max, d.bbox.y_max],
                    label: d.label.clone(),
                })
                .collect(),
            bbox_type: inputs
                .detections
                .iter()
                .map(|d| d.kind.to_string())
                .collect(),
            is_step_correct: None,
            is_final_success: None,
        };
        self.steps.push(step);
        Ok(self.steps.last().unwrap())
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Seal the episode.
    pub fn finish(self, terminal_status: TerminalStatus) -> EpisodeFile {
        EpisodeFile {
            episode_version: EPISODE_VERSION,
            metadata: EpisodeMeta {
                task_id: self.task_id,
                device_id: self.device_id,
                seed: self.seed,
                timestamps_normalized: true,
                terminal_status,
                audit: Vec::new(),
            },
            steps: self.steps,
        }
    }
}

/// Apply human (or sim ground-truth) correctness labels: one per step plus
/// the final success flag. Prior label values are preserved in the metadata
/// audit trail.
pub fn annotate_correctness(
    mut episode: EpisodeFile,
    step_labels: &[bool],
    final_label: bool,
) -> Result<EpisodeFile, DatasetError> {
    if step_labels.len() != episode.steps.len() {
        return Err(DatasetError::LabelCount {
            expected: episode.steps.len(),
            got: step_labels.len(),
        });
    }
    let last = episode.steps.len() - 1;
    for (i, (step, &label)) in episode.steps.iter_mut().zip(step_labels).enumerate() {
        if let Some(old) = step.is_step_correct {
            if old != label {
                episode.metadata.audit.push(AuditEntry {
                    step: i,
                    attribute: "is_step_correct".into(),
                    old: serde_json::json!(old),
                    new: serde_json::json!(label),
                });
            }
        }
        step.is_step_correct = Some(label);
        if i == last {
            if let Some(old) = step.is_final_success {
                if old != final_label {
                    episode.metadata.audit.push(AuditEntry {
                        step: i,
                        attribute: "is_final_success".into(),
                        old: serde_json::json!(old),
                        new: serde_json::json!(final_label),
                    });
                }
            }
            step.is_final_success = Some(final_label);
        }
    }
    Ok(episode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{BBox, ScreenDims};
    use crate::sim::pack::ElementKind;

    fn obs() -> ScreenObservation {
        ScreenObservation {
            step_index: 0,
            raster_ref: BlobRef::for_bytes(b"screen"),
            scene: None,
            dims: ScreenDims::new(100, 200),
        }
    }

    fn record_two_steps() -> EpisodeFile {
        let mut rec = EpisodeRecorder::new("t1", "dev", 7, None);
        let detections = vec![IndexedBBox {
            index: 1,
            bbox: BBox::new(0, 0, 10, 10),
            kind: ElementKind::Icon,
            label: Some("x".into()),
        }];
        for i in 0..2 {
            rec.record_step(StepInputs {
                observation: &obs(),
                raster: None,
                instruction: "do it",
                observation_text: "a screen",
                thought: &format!("step {i}"),
                action_abstract: "tap (5, 5)".into(),
                hardware_lines: vec!["tap at (5, 5)".into()],
                detections: &detections,
            })
            .unwrap();
        }
        rec.finish(TerminalStatus::AgentDone)
    }

    #[test]
    fn steps_serialize_all_ten_attributes() {
        let file = record_two_steps();
        let v: serde_json::Value = serde_json::from_slice(&file.to_json_bytes()).unwrap();
        let step = &v["steps"][0];
        let keys: Vec<&String> = step.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 10, "exactly ten attributes, got {keys:?}");
        for k in [
            "screenshot",
            "instruction",
            "observation",
            "thought",
            "action",
            "action_hardware",
            "gui_bboxes",
            "bbox_type",
            "is_step_correct",
            "is_final_success",
        ] {
            assert!(step.get(k).is_some(), "missing {k}");
        }
    }

    #[test]
    fn annotate_sets_labels_and_final_flag() {
        let file = record_two_steps();
        let annotated = annotate_correctness(file, &[true, true], true).unwrap();
        assert_eq!(annotated.steps[0].is_step_correct, Some(true));
        assert_eq!(annotated.steps[0].is_final_success, None);
        assert_eq!(annotated.steps[1].is_final_success, Some(true));
    }

    #[test]
    fn annotate_label_count_mismatch() {
        let file = record_two_steps();
        let err = annotate_correctness(file, &[true], true).unwrap_err();
        match err {
            DatasetError::LabelCount { expected, got } => {
                assert_eq!((expected, got), (2, 1));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn relabeling_keeps_an_audit_trail() {
        let file = record_two_steps();
        let once = annotate_correctness(file, &[true, true], true).unwrap();
        let twice = annotate_correctness(once, &[true, false], false).unwrap();
        assert_eq!(twice.steps[1].is_step_correct, Some(false));
        assert_eq!(twice.metadata.audit.len(), 2); // step label + final flag
        assert_eq!(twice.metadata.audit[0].attribute, "is_step_correct");
    }

    #[test]
    fn save_load_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ep.json");
        let file = record_two_steps();
        file.save(&path).unwrap();
        assert_eq!(EpisodeFile::load(&path).unwrap(), file);
    }
}
