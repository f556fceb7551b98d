//! The episode loop: observe, ground and mark, prompt, decide, execute,
//! record, reflect, until the agent reports done or the budget runs out.

use crate::action::execute::{execute, ExecutionContext};
use crate::action::keyboard::LayoutCache;
use crate::action::{ActionError, ActionSpec};
use crate::agent::decision::{decide_with_repair, ExpectedOutcome};
use crate::agent::history::{History, StepRecord, StepStatus};
use crate::agent::policy::PolicyClient;
use crate::agent::prompt::build_prompt;
use crate::agent::AgentError;
use crate::arm::trajectory::TouchPlanner;
use crate::bench::task::TaskSpec;
use crate::blob::BlobStore;
use crate::dataset::episode::{EpisodeRecorder, StepInputs};
use crate::dataset::{EpisodeFile, TerminalStatus};
use crate::perception::{annotate_marks, Grounder, PerceptionError};
use crate::sim::env::{screen_delta, Environment, ScreenDelta};

/// A finished episode plus the sim-side evidence the harness needs to judge
/// it (state fingerprints after each executed step).
#[derive(Debug, Clone)]
pub struct EpisodeRun {
    pub task_id: String,
    pub terminal_status: TerminalStatus,
    pub file: EpisodeFile,
    pub history: History,
    /// Environment state fingerprint after each executed step, in order.
    pub state_fingerprints: Vec<String>,
    /// Steps that executed an environment action (fingerprint count).
    pub executed_steps: u32,
}

/// Self-reflection: when the last step's declared expectation conflicts with
/// the observed delta, mark it suspected-wrong and emit a corrective Back.
pub fn reflect(history: &mut History, delta: &ScreenDelta) -> Option<ActionSpec> {
    let last = history.last()?;
    let conflict = match last.expected_outcome? {
        ExpectedOutcome::ScreenChanges => delta.unchanged,
        ExpectedOutcome::ScreenUnchanged => !delta.unchanged,
    };
    if conflict {
        history.mark_last_suspected();
        Some(ActionSpec::Back)
    } else {
        None
    }
}

/// Action-level failures surface to the agent (recorded, loop continues);
/// anything else aborts the episode as unrecoverable.
fn is_surfaceable(err: &ActionError) -> bool {
    !matches!(
        err,
        ActionError::Perception(PerceptionError::Unreachable(_))
            | ActionError::Perception(PerceptionError::Timeout(_))
            | ActionError::Perception(PerceptionError::BadStatus(_))
            | ActionError::Perception(PerceptionError::BadPayload(_))
            | ActionError::CacheIo(_)
            | ActionError::CacheFormat(_)
    )
}

#[allow(clippy::too_many_arguments)]
pub fn run_episode(
    task: &TaskSpec,
    env: &mut Environment,
    planner: &TouchPlanner,
    grounder: &dyn Grounder,
    policy: &mut dyn PolicyClient,
    layouts: &mut LayoutCache,
    device_id: &str,
    budget: u32,
    seed: u64,
    blobs: Option<BlobStore>,
) -> Result<EpisodeRun, AgentError> {
    env.reset(&task.reset_origin())?;
    let dims = env.dims();
    let mut history = History::new();
    let mut recorder = EpisodeRecorder::new(&task.task_id, device_id, seed, blobs);
    let mut state_fingerprints: Vec<String> = Vec::new();
    let mut executed: u32 = 0;

    let terminal_status = 'episode: loop {
        if executed >= budget {
            break TerminalStatus::StepBudgetExhausted;
        }

        // Observe, detect, mark.
        let pre_obs = env.observe();
        history.set_observation(pre_obs.clone());
        let detections = match grounder.detect_icons(&pre_obs) {
            Ok(d) => d,
            Err(_) => break TerminalStatus::UnrecoverableError,
        };
        let raster = env.render_current();
        let (_, marked) = annotate_marks(&raster, &detections);

        // Decide (with bounded parse repair).
        let bundle = build_prompt(&task.instruction, &history, &pre_obs, &marked);
        let decision = match decide_with_repair(policy, &bundle, dims) {
            Ok(d) => d,
            Err(_) => break TerminalStatus::UnrecoverableError,
        };
        let index = history.len() as u64;

        let Some(action) = decision.action.clone() else {
            // Terminal decision without an action: record it and stop.
            recorder.record_step(StepInputs {
                observation: &pre_obs,
                raster: Some(&raster),
                instruction: &task.instruction,
                observation_text: &decision.observation,
                thought: &decision.thought,
                action_abstract: "done".into(),
                hardware_lines: Vec::new(),
                detections: &detections,
            })?;
            history.push(decision.into_record(index));
            break TerminalStatus::AgentDone;
        };

        let done = decision.status == StepStatus::Done;
        let mut ctx = ExecutionContext {
            env,
            planner,
            grounder,
            layouts,
            device_id,
        };
        match execute(&action, &mut ctx) {
            Ok(report) => {
                executed += 1;
                state_fingerprints.push(env.state_fingerprint());
                recorder.record_step(StepInputs {
                    observation: &pre_obs,
                    raster: Some(&raster),
                    instruction: &task.instruction,
                    observation_text: &decision.observation,
                    thought: &decision.thought,
                    action_abstract: action.describe(),
                    hardware_lines: report.hardware.iter().map(|h| h.op.to_line()).collect(),
                    detections: &detections,
                })?;
                history.push(decision.into_record(index));
                if done {
                    break TerminalStatus::AgentDone;
                }

                // Reflection against the observed delta.
                let post_obs = env.observe();
                let delta = screen_delta(&pre_obs, &post_obs);
                if let Some(corrective) = reflect(&mut history, &delta) {
                    if executed >= budget {
                        break TerminalStatus::StepBudgetExhausted;
                    }
                    let mut ctx = ExecutionContext {
                        env,
                        planner,
                        grounder,
                        layouts,
                        device_id,
                    };
                    let corrective_index = history.len() as u64;
                    match execute(&corrective, &mut ctx) {
                        Ok(report) => {
                            executed += 1;
                            state_fingerprints.push(env.state_fingerprint());
                            recorder.record_step(StepInputs {
                                observation: &post_obs,
                                raster: Some(&env.render_current()),
                                instruction: &task.instruction,
                                observation_text: "reflection: expectation conflicted with the screen delta",
                                thought: "reverting the suspected-wrong step",
                                action_abstract: corrective.describe(),
                                hardware_lines: report
                                    .hardware
                                    .iter()
                                    .map(|h| h.op.to_line())
                                    .collect(),
                                detections: &[],
                            })?;
                            history.push(StepRecord {
                                index: corrective_index,
                                observation_summary:
                                    "reflection: expectation conflicted with the screen delta"
                                        .into(),
                                thought: "reverting the suspected-wrong step".into(),
                                env_action: Some(corrective),
                                expected_outcome: None,
                                status: StepStatus::Continue,
                                component_logprobs: None,
                                suspected_wrong: false,
                            });
                        }
                        Err(e) if is_surfaceable(&e) => {
                            // The corrective itself failed; note it and move on.
                            history.push(StepRecord {
                                index: corrective_index,
                                observation_summary: format!("reflection corrective failed: {e}"),
                                thought: "continuing without revert".into(),
                                env_action: None,
                                expected_outcome: None,
                                status: StepStatus::Continue,
                                component_logprobs: None,
                                suspected_wrong: false,
                            });
                        }
                        Err(_) => break 'episode TerminalStatus::UnrecoverableError,
                    }
                }
            }
            Err(e) if is_surfaceable(&e) => {
                // Surfaced to the agent for its next decision; the step is
                // recorded with no hardware.
                executed += 1;
                state_fingerprints.push(env.state_fingerprint());
                recorder.record_step(StepInputs {
                    observation: &pre_obs,
                    raster: Some(&raster),
                    instruction: &task.instruction,
                    observation_text: &format!("{} (action failed: {e})", decision.observation),
                    thought: &decision.thought,
                    action_abstract: action.describe(),
                    hardware_lines: Vec::new(),
                    detections: &detections,
                })?;
                let mut record = decision.into_record(index);
                record.observation_summary = format!("{} (action failed: {e})", record.observation_summary);
                history.push(record);
                if done {
                    break TerminalStatus::AgentDone;
                }
            }
            Err(_) => break TerminalStatus::UnrecoverableError,
        }
    };

    Ok(EpisodeRun {
        task_id: task.task_id.clone(),
        terminal_status,
        file: recorder.finish(terminal_status),
        history,
        state_fingerprints,
        executed_steps: executed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::decision::ExpectedOutcome;
    use crate::agent::history::StepStatus;
    use crate::sim::env::ScreenDelta;

    fn delta(unchanged: bool) -> ScreenDelta {
        ScreenDelta {
            unchanged,
            added: Vec::new(),
            removed: Vec::new(),
        }
    }

    fn history_with(expected: Option<ExpectedOutcome>) -> History {
        let mut h = History::new();
        h.push(StepRecord {
            index: 0,
            observation_summary: "s".into(),
            thought: "t".into(),
            env_action: Some(ActionSpec::Tap { x: 1, y: 1 }),
            expected_outcome: expected,
            status: StepStatus::Continue,
            component_logprobs: None,
            suspected_wrong: false,
        });
        h
    }

    #[test]
    fn expected_change_but_unchanged_emits_back_and_marks_suspect() {
        let mut h = history_with(Some(ExpectedOutcome::ScreenChanges));
        let corrective = reflect(&mut h, &delta(true));
        assert_eq!(corrective, Some(ActionSpec::Back));
        assert!(h.last().unwrap().suspected_wrong);
    }

    #[test]
    fn expected_change_and_changed_is_quiet() {
        let mut h = history_with(Some(ExpectedOutcome::ScreenChanges));
        assert_eq!(reflect(&mut h, &delta(false)), None);
        assert!(!h.last().unwrap().suspected_wrong);
    }

    #[test]
    fn no_expectation_or_empty_history_is_quiet() {
        let mut h = history_with(None);
        assert_eq!(reflect(&mut h, &delta(true)), None);
        let mut empty = History::new();
        assert_eq!(reflect(&mut empty, &delta(true)), None);
    }

    #[test]
    fn expected_unchanged_but_changed_also_conflicts() {
        let mut h = history_with(Some(ExpectedOutcome::ScreenUnchanged));
        assert_eq!(reflect(&mut h, &delta(false)), Some(ActionSpec::Back));
    }
}
