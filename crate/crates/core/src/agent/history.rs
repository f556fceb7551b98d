//! The agent's memory: an append-only record of prior steps plus the
//! current observation.

use serde::{Deserialize, Serialize};

use crate::action::ActionSpec;
use crate::agent::decision::ExpectedOutcome;
use crate::sim::env::ScreenObservation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepStatus {
    Continue,
    Done,
}

/// One committed step: the decomposed action tuple (observation summary,
/// thought, environment action) plus bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: u64,
    pub observation_summary: String,
    pub thought: String,
    /// Absent only on terminal (status = done) records.
    pub env_action: Option<ActionSpec>,
    pub expected_outcome: Option<ExpectedOutcome>,
    pub status: StepStatus,
    /// (thought, action) component log-probabilities when the policy
    /// reports them. Finite and <= 0.
    pub component_logprobs: Option<(f64, f64)>,
    /// Set by reflection when the step's expectation conflicted with the
    /// observed delta.
    pub suspected_wrong: bool,
}

/// Append-only history. Prior records are immutable except for the
/// suspected-wrong flag set by reflection.
#[derive(Debug, Clone, Default)]
pub struct History {
    entries: Vec<StepRecord>,
    current_observation: Option<ScreenObservation>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[StepRecord] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last(&self) -> Option<&StepRecord> {
        self.entries.last()
    }

    pub fn set_observation(&mut self, obs: ScreenObservation) {
        self.current_observation = Some(obs);
    }

    pub fn current_observation(&self) -> Option<&ScreenObservation> {
        self.current_observation.as_ref()
    }

    /// Append the next record; indices must arrive in order without gaps.
    pub fn push(&mut self, record: StepRecord) {
        debug_assert_eq!(record.index as usize, self.entries.len());
        self.entries.push(record);
    }

    /// The one sanctioned mutation of a prior record.
    pub fn mark_last_suspected(&mut self) {
        if let Some(last) = self.entries.last_mut() {
            last.suspected_wrong = true;
        }
    }

    /// Compact one-line summary of each prior step, for prompt assembly.
    pub fn summaries(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|r| {
                let action = r
                    .env_action
                    .as_ref()
                    .map(|a| a.describe())
                    .unwrap_or_else(|| "(none)".to_string());
                let suspect = if r.suspected_wrong { " [suspected wrong]" } else { "" };
                format!(
                    "step {}: saw \"{}\"; thought \"{}\"; did {}{}",
                    r.index + 1,
                    r.observation_summary,
                    r.thought,
                    action,
                    suspect
                )
            })
            .collect()
    }
}
