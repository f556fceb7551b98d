//! Prompt assembly: the bundle handed to a policy each step. Deterministic
//! for identical inputs; history enters as text summaries plus only the
//! current marked image, keeping context bounded for real services.

use serde::{Deserialize, Serialize};

use crate::agent::history::History;
use crate::perception::MarkedImage;
use crate::sim::env::ScreenObservation;

pub const ACTION_SPACE_DOC: &str = "\
Actions (JSON): \
{\"type\":\"tap\",\"x\":<int>,\"y\":<int>} | \
{\"type\":\"swipe\",\"x\":<int>,\"y\":<int>,\"direction\":\"up|down|left|right\",\"distance\":\"short|medium|long\"} | \
{\"type\":\"text\",\"text\":<string>} | \
{\"type\":\"back\"} | \
{\"type\":\"exit\"}. \
Swipe distances move 1/4, 1/3, or 1/2 of the screen along the direction.";

pub const RESPONSE_CONTRACT_DOC: &str = "\
Respond with a single JSON object: \
{\"observation\":<string>,\"thought\":<string>,\"action\":<action or null>,\
\"expected_outcome\":\"screen_changes\"|\"screen_unchanged\"|null,\
\"status\":\"continue\"|\"done\"}. \
Set status done (action may be null) once the task is complete.";

/// Everything a policy gets to see for one decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub instruction: String,
    pub step_index: u64,
    /// One line per prior step.
    pub prior_steps: Vec<String>,
    /// Content-addressed reference of the current set-of-mark image.
    pub marked_image_ref: String,
    /// Text listing of the current marks: "[i] kind 'label' center (x, y)".
    pub mark_listing: Vec<String>,
    pub screen_width: u32,
    pub screen_height: u32,
    pub action_space_doc: String,
    pub response_contract_doc: String,
    /// Set on repair re-prompts: the parse error from the failed attempt.
    pub repair: Option<String>,
}

impl PromptBundle {
    pub fn with_repair(&self, error: &str) -> Self {
        let mut next = self.clone();
        next.repair = Some(format!(
            "Your previous response could not be parsed: {error}. \
             Reply again following the response contract exactly."
        ));
        next
    }

    /// Canonical single-string rendering; deterministic, used both for
    /// hashing in tests and as the user message to remote services.
    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("INSTRUCTION: {}\n", self.instruction));
        s.push_str(&format!(
            "SCREEN: {}x{} image {}\n",
            self.screen_width, self.screen_height, self.marked_image_ref
        ));
        if self.prior_steps.is_empty() {
            s.push_str(&format!("STEP {} (first observation)\n", self.step_index + 1));
        } else {
            s.push_str(&format!("STEP {}\nHISTORY:\n", self.step_index + 1));
            for line in &self.prior_steps {
                s.push_str("  ");
                s.push_str(line);
                s.push('\n');
            }
        }
        if !self.mark_listing.is_empty() {
            s.push_str("MARKS:\n");
            for line in &self.mark_listing {
                s.push_str("  ");
                s.push_str(line);
                s.push('\n');
            }
        }
        if let Some(repair) = &self.repair {
            s.push_str(&format!("REPAIR: {repair}\n"));
        }
        s
    }

    #[doc(hidden)]
    pub fn for_test(instruction: &str) -> Self {
        PromptBundle {
            instruction: instruction.to_string(),
            step_index: 0,
            prior_steps: Vec::new(),
            marked_image_ref: "sha256:test".into(),
            mark_listing: Vec::new(),
            screen_width: 1080,
            screen_height: 2400,
            action_space_doc: ACTION_SPACE_DOC.to_string(),
            response_contract_doc: RESPONSE_CONTRACT_DOC.to_string(),
            repair: None,
        }
    }
}

/// Assemble the prompt for the current step: instruction, serialized prior
/// steps, the marked image reference, the action-space description, and the
/// response-format contract.
pub fn build_prompt(
    instruction: &str,
    history: &History,
    obs: &ScreenObservation,
    marked: &MarkedImage,
) -> PromptBundle {
    let mark_listing = marked
        .marks
        .iter()
        .map(|m| {
            let center = crate::perception::center_of(&m.bbox);
            format!(
                "[{}] {} '{}' center ({}, {})",
                m.index,
                m.kind,
                m.label.as_deref().unwrap_or(""),
                center.0,
                center.1
            )
        })
        .collect();
    PromptBundle {
        instruction: instruction.to_string(),
        step_index: history.len() as u64,
        prior_steps: history.summaries(),
        marked_image_ref: marked.raster_ref.to_string(),
        mark_listing,
        screen_width: obs.dims.width,
        screen_height: obs.dims.height,
        action_space_doc: ACTION_SPACE_DOC.to_string(),
        response_contract_doc: RESPONSE_CONTRACT_DOC.to_string(),
        repair: None,
    }
}
