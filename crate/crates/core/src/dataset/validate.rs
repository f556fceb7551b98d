//! Structural validation of episode files against the ten-attribute schema.
//! Checks run over the raw JSON so missing/extra keys are caught even when
//! typed deserialization would paper over them.

use std::path::Path;

use serde_json::Value;

use crate::blob::{BlobRef, BlobStore};
use crate::dataset::{DatasetError, EPISODE_VERSION};

/// One schema violation, localized to the offending step/attribute.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

const STEP_ATTRIBUTES: [&str; 10] = [
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
];

fn violation(out: &mut Vec<Violation>, location: impl Into<String>, message: impl Into<String>) {
    out.push(Violation {
        location: location.into(),
        message: message.into(),
    });
}

/// Validate episode JSON. An empty result means the file is valid.
/// `blobs`, when given, additionally checks that every screenshot resolves.
pub fn validate_episode_json(
    raw: &str,
    blobs: Option<&BlobStore>,
) -> Result<Vec<Violation>, DatasetError> {
    let root: Value =
        serde_json::from_str(raw).map_err(|e| DatasetError::Format(e.to_string()))?;
    let mut out = Vec::new();

    match root.get("episode_version").and_then(Value::as_u64) {
        Some(v) if v == EPISODE_VERSION as u64 => {}
        Some(v) => violation(
            &mut out,
            "episode_version",
            format!("unsupported version {v}, expected {EPISODE_VERSION}"),
        ),
        None => violation(&mut out, "episode_version", "missing or not an integer"),
    }

    let meta = root.get("metadata");
    match meta {
        None => violation(&mut out, "metadata", "missing"),
        Some(m) => {
            for key in ["task_id", "device_id", "seed", "timestamps_normalized", "terminal_status"]
            {
                if m.get(key).is_none() {
                    violation(&mut out, format!("metadata.{key}"), "missing");
                }
            }
        }
    }

    let steps = match root.get("steps").and_then(Value::as_array) {
        Some(steps) if !steps.is_empty() => steps,
        Some(_) => {
            violation(&mut out, "steps", "episode has no steps");
            return Ok(out);
        }
        None => {
            violation(&mut out, "steps", "missing or not an array");
            return Ok(out);
        }
    };

    let last = steps.len() - 1;
    for (i, step) in steps.iter().enumerate() {
        let loc = |attr: &str| format!("steps[{i}].{attr}");
        let obj = match step.as_object() {
            Some(o) => o,
            None => {
                violation(&mut out, format!("steps[{i}]"), "not an object");
                continue;
            }
        };
        for attr in STEP_ATTRIBUTES {
            if !obj.contains_key(attr) {
                violation(&mut out, loc(attr), "required attribute missing");
            }
        }
        for key in obj.keys() {
            if !STEP_ATTRIBUTES.contains(&key.as_str()) {
                violation(&mut out, loc(key), "attribute not in the step schema");
            }
        }

        if let Some(shot) = obj.get("screenshot") {
            match shot.as_str() {
                Some(s) => {
                    if let Err(e) = BlobRef::parse(s) {
                        violation(&mut out, loc("screenshot"), e.to_string());
                    } else if let Some(store) = blobs {
                        let r = BlobRef::parse(s).unwrap();
                        if !store.contains(&r) {
                            violation(
                                &mut out,
                                loc("screenshot"),
                                format!("blob {r} does not resolve in the store"),
                            );
                        }
                    }
                }
                None => violation(&mut out, loc("screenshot"), "not a string"),
            }
        }

        for attr in ["instruction", "observation", "thought", "action", "action_hardware"] {
            if let Some(v) = obj.get(attr) {
                if !v.is_string() {
                    violation(&mut out, loc(attr), "not a string");
                }
            }
        }

        let n_boxes = match obj.get("gui_bboxes").map(|v| (v, v.as_array())) {
            Some((_, Some(boxes))) => {
                for (k, b) in boxes.iter().enumerate() {
                    let idx = b.get("index").and_then(Value::as_u64);
                    if idx != Some((k + 1) as u64) {
                        violation(
                            &mut out,
                            format!("steps[{i}].gui_bboxes[{k}].index"),
                            format!("indices must be contiguous from 1, found {idx:?}"),
                        );
                    }
                    match b.get("bbox").and_then(Value::as_array) {
                        Some(c) if c.len() == 4 => {}
                        _ => violation(
                            &mut out,
                            format!("steps[{i}].gui_bboxes[{k}].bbox"),
                            "expected [x_min, y_min, x_max, y_max]",
                        ),
                    }
                }
                Some(boxes.len())
            }
            Some((_, None)) => {
                violation(&mut out, loc("gui_bboxes"), "not an array");
                None
            }
            None => None,
        };

        if let Some(types) = obj.get("bbox_type") {
            match types.as_array() {
                Some(list) => {
                    // Only cross-check lengths when gui_bboxes itself parsed;
                    // a missing sibling already has its own violation.
                    if let Some(n) = n_boxes {
                        if list.len() != n {
                            violation(
                                &mut out,
                                loc("bbox_type"),
                                format!("length {} != gui_bboxes length {n}", list.len()),
                            );
                        }
                    }
                    for (k, t) in list.iter().enumerate() {
                        match t.as_str() {
                            Some("icon") | Some("text") => {}
                            other => violation(
                                &mut out,
                                format!("steps[{i}].bbox_type[{k}]"),
                                format!("expected \"icon\" or \"text\", found {other:?}"),
                            ),
                        }
                    }
                }
                None => violation(&mut out, loc("bbox_type"), "not an array"),
            }
        }

        if let Some(v) = obj.get("is_step_correct") {
            if !(v.is_null() || v.is_boolean()) {
                violation(&mut out, loc("is_step_correct"), "expected bool or null");
            }
        }
        if let Some(v) = obj.get("is_final_success") {
            if !(v.is_null() || v.is_boolean()) {
                violation(&mut out, loc("is_final_success"), "expected bool or null");
            } else if !v.is_null() && i != last {
                violation(
                    &mut out,
                    loc("is_final_success"),
                    "may only be set on the terminal step",
                );
            }
        }
    }

    Ok(out)
}

/// Validate an episode file on disk.
pub fn validate_file(
    path: impl AsRef<Path>,
    blobs: Option<&BlobStore>,
) -> Result<Vec<Violation>, DatasetError> {
    let raw = std::fs::read_to_string(path)?;
    validate_episode_json(&raw, blobs)
}
