//! Episode datasets: recording, validating, annotating, and replaying
//! operation episodes in the ten-attribute step schema.

pub mod episode;
pub mod replay;
pub mod validate;

use serde::{Deserialize, Serialize};

pub use episode::{
    annotate_correctness, EpisodeFile, EpisodeMeta, EpisodeRecorder, EpisodeStep, RecordedBox,
    StepInputs,
};
pub use replay::{parse_hardware_line, replay_episode, HardwareLine, ReplayOutcome};
pub use validate::{validate_episode_json, validate_file, Violation};

pub const EPISODE_VERSION: u32 = 1;

/// How an episode ended. Encoded in the file metadata, never a crash.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalStatus {
    AgentDone,
    StepBudgetExhausted,
    UnrecoverableError,
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("episode io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("episode file is malformed: {0}")]
    Format(String),
    #[error("label count mismatch: expected {expected} step labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("unparseable hardware action line `{0}`")]
    BadHardwareLine(String),
    #[error(transparent)]
    Blob(#[from] crate::blob::BlobError),
    #[error(transparent)]
    Arm(#[from] crate::arm::ArmError),
    #[error(transparent)]
    Env(#[from] crate::sim::env::EnvError),
}
