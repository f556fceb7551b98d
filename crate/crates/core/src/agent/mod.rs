//! The agent loop: history accumulation, prompt assembly, policy invocation,
//! decision parsing with bounded repair, self-reflection, and termination.

pub mod decision;
pub mod history;
pub mod policy;
pub mod prompt;
pub mod runner;

pub use decision::{decide_with_repair, joint_logprob, parse_decision, Decision, ExpectedOutcome};
pub use history::{History, StepRecord, StepStatus};
pub use policy::{PolicyClient, PolicyError, RandomPolicy, RemotePolicy, ScriptedPolicy};
pub use prompt::{build_prompt, PromptBundle};
pub use runner::{reflect, run_episode, EpisodeRun};

pub const PARSE_REPAIR_RETRIES: u32 = 2;

/// Default step budget for a task: 3x its golden steps, floor 10.
pub fn default_budget(golden_steps: u32) -> u32 {
    (3 * golden_steps).max(10)
}

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("policy failure: {0}")]
    Policy(#[from] PolicyError),
    #[error("response unparseable after {retries} repair attempts: {last_error}")]
    ParseExhausted { retries: u32, last_error: String },
    #[error("step record carries no component logprobs")]
    MissingLogprobs,
    #[error(transparent)]
    Perception(#[from] crate::perception::PerceptionError),
    #[error(transparent)]
    Dataset(#[from] crate::dataset::DatasetError),
    #[error(transparent)]
    Env(#[from] crate::sim::env::EnvError),
}
