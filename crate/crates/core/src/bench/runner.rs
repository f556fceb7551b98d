//! Executes a task pack: one episode per task with per-origin resets,
//! ground-truth judging against golden replays, and aggregated reporting.

use std::fs;
use std::path::PathBuf;
use std::sync::Mutex;

use serde::Serialize;

use crate::action::execute::{execute, ExecutionContext};
use crate::action::keyboard::LayoutCache;
use crate::agent::policy::{PolicyClient, RandomPolicy, RemotePolicy, ScriptedPolicy};
use crate::agent::runner::{run_episode, EpisodeRun};
use crate::agent::default_budget;
use crate::arm::profile::DeviceProfile;
use crate::arm::trajectory::TouchPlanner;
use crate::bench::metrics::{aggregate, MetricsReport, TaskOutcome};
use crate::bench::task::{TaskPack, TaskSpec};
use crate::bench::BenchError;
use crate::blob::{stable_hash64, BlobStore};
use crate::dataset::episode::annotate_correctness;
use crate::dataset::{EpisodeFile, TerminalStatus};
use crate::perception::scene::SceneGrounder;
use crate::sim::env::Environment;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentKind {
    Scripted,
    Random,
    PolicyService,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub agent: AgentKind,
    pub seed: u64,
    /// Per-task step budget; None uses the default (3x golden, min 10).
    pub budget: Option<u32>,
    pub jobs: usize,
    pub out_dir: PathBuf,
}

/// Ground-truth state sequence from replaying a golden trajectory.
#[derive(Debug, Clone)]
pub struct GoldenReplay {
    /// Environment fingerprint after each golden action.
    pub states: Vec<String>,
}

/// Replay the task's golden trajectory on a fresh clone of the base
/// environment, collecting the state fingerprint after every action.
pub fn golden_replay(
    task: &TaskSpec,
    base_env: &Environment,
    planner: &TouchPlanner,
) -> Option<GoldenReplay> {
    let golden = task.golden_trajectory.as_ref()?;
    let mut env = base_env.clone();
    env.reset(&task.reset_origin()).ok()?;
    let grounder = SceneGrounder;
    let mut layouts = LayoutCache::in_memory();
    let mut states = Vec::with_capacity(golden.len());
    for action in golden {
        let mut ctx = ExecutionContext {
            env: &mut env,
            planner,
            grounder: &grounder,
            layouts: &mut layouts,
            device_id: "golden-replay",
        };
        execute(action, &mut ctx).ok()?;
        states.push(env.state_fingerprint());
    }
    Some(GoldenReplay { states })
}

/// Judge an episode against ground truth. Success requires the agent to
/// have declared done with the environment in the golden end state. Step
/// labels: all true on success; otherwise the longest matching prefix of
/// the golden state sequence.
pub fn judge_outcome(
    task: &TaskSpec,
    run: &EpisodeRun,
    golden: Option<&GoldenReplay>,
) -> (TaskOutcome, Vec<bool>, bool) {
    let total = run.executed_steps;
    let Some(golden) = golden else {
        // No ground truth: leave the episode for human annotation.
        let outcome = TaskOutcome {
            task_id: task.task_id.clone(),
            success: false,
            agent_steps_successful: 0,
            agent_steps_total: total,
            diagnostics: Some("no golden trajectory; success requires human labels".into()),
        };
        let labels = vec![false; run.file.steps.len()];
        return (outcome, labels, false);
    };

    let reached_goal = run
        .state_fingerprints
        .last()
        .map(|s| Some(s) == golden.states.last())
        .unwrap_or(false);
    let success =
        run.terminal_status == TerminalStatus::AgentDone && reached_goal && total >= 1;

    let mut exec_labels = Vec::with_capacity(run.state_fingerprints.len());
    if success {
        exec_labels.resize(run.state_fingerprints.len(), true);
    } else {
        let mut intact = true;
        for (i, state) in run.state_fingerprints.iter().enumerate() {
            intact = intact && golden.states.get(i) == Some(state);
            exec_labels.push(intact);
        }
    }
    let successful = exec_labels.iter().filter(|&&b| b).count() as u32;

    // Map per-execution labels back onto episode steps. Every step consumed
    // a fingerprint slot except a bare terminal "done" (no action ran).
    let mut labels = Vec::with_capacity(run.file.steps.len());
    let mut exec_iter = exec_labels.iter();
    for step in &run.file.steps {
        if step.action == "done" && step.action_hardware == "noop" {
            labels.push(success);
        } else {
            labels.push(*exec_iter.next().unwrap_or(&success));
        }
    }

    let outcome = TaskOutcome {
        task_id: task.task_id.clone(),
        success,
        agent_steps_successful: if success { total } else { successful },
        agent_steps_total: total,
        diagnostics: match run.terminal_status {
            TerminalStatus::AgentDone => None,
            TerminalStatus::StepBudgetExhausted => Some("step budget exhausted".into()),
            TerminalStatus::UnrecoverableError => Some("unrecoverable error".into()),
        },
    };
    (outcome, labels, success)
}

#[derive(Debug, Serialize)]
pub struct BenchRunOutput {
    #[serde(skip)]
    pub report: MetricsReport,
    pub outcomes: Vec<TaskOutcome>,
    pub episode_paths: Vec<PathBuf>,
}

fn make_policy(kind: AgentKind, task: &TaskSpec, seed: u64) -> Result<Box<dyn PolicyClient>, BenchError> {
    match kind {
        AgentKind::Scripted => {
            let golden = task
                .golden_trajectory
                .clone()
                .ok_or_else(|| BenchError::ScriptedNeedsGolden(task.task_id.clone()))?;
            Ok(Box::new(ScriptedPolicy::new(golden)))
        }
        AgentKind::Random => Ok(Box::new(RandomPolicy::new(seed))),
        AgentKind::PolicyService => {
            let policy = RemotePolicy::from_env()
                .map_err(|e| BenchError::Io(std::io::Error::other(e.to_string())))?;
            Ok(Box::new(policy))
        }
    }
}

/// Seed for one task, derived so per-task randomness is independent of pack
/// order.
fn task_seed(base: u64, task_id: &str) -> u64 {
    base ^ stable_hash64(task_id)
}

struct TaskResult {
    outcome: TaskOutcome,
    episode: EpisodeFile,
}

fn run_one_task(
    task: &TaskSpec,
    base_env: &Environment,
    planner: &TouchPlanner,
    device_id: &str,
    cfg: &BenchConfig,
    blobs: Option<BlobStore>,
) -> TaskResult {
    let seed = task_seed(cfg.seed, &task.task_id);
    let budget = cfg.budget.unwrap_or_else(|| default_budget(task.golden_steps));
    let golden = golden_replay(task, base_env, planner);

    let mut env = base_env.clone();
    let grounder = SceneGrounder;
    let mut layouts = LayoutCache::in_memory();

    let policy = make_policy(cfg.agent, task, seed);
    let run = policy.and_then(|mut policy| {
        run_episode(
            task,
            &mut env,
            planner,
            &grounder,
            policy.as_mut(),
            &mut layouts,
            device_id,
            budget,
            seed,
            blobs,
        )
        .map_err(|e| BenchError::Io(std::io::Error::other(e.to_string())))
    });

    match run {
        Ok(run) => {
            let (outcome, labels, final_success) = judge_outcome(task, &run, golden.as_ref());
            let episode = if run.file.steps.is_empty() {
                run.file
            } else {
                annotate_correctness(run.file.clone(), &labels, final_success)
                    .unwrap_or(run.file)
            };
            TaskResult { outcome, episode }
        }
        Err(e) => {
            // An episode crash is a failed outcome with diagnostics, never
            // an aborted run.
            let outcome = TaskOutcome {
                task_id: task.task_id.clone(),
                success: false,
                agent_steps_successful: 0,
                agent_steps_total: 0,
                diagnostics: Some(format!("episode crashed: {e}")),
            };
            let episode = crate::dataset::episode::EpisodeRecorder::new(
                &task.task_id,
                device_id,
                seed,
                None,
            )
            .finish(TerminalStatus::UnrecoverableError);
            TaskResult { outcome, episode }
        }
    }
}

/// Run every task in the pack and aggregate the report. Outputs land under
/// `cfg.out_dir`: `report.json`, `report.txt`, `outcomes.json`,
/// `episodes/<task_id>.json`, and the shared blob directory.
pub fn run_benchmark(
    tasks: &TaskPack,
    screen_pack: std::sync::Arc<crate::sim::pack::ScreenPack>,
    profile: &DeviceProfile,
    cfg: &BenchConfig,
) -> Result<BenchRunOutput, BenchError> {
    if cfg.budget == Some(0) {
        return Err(BenchError::ZeroBudget);
    }
    tasks.validate()?;
    if cfg.agent == AgentKind::Scripted {
        for t in &tasks.tasks {
            if t.golden_trajectory.is_none() {
                return Err(BenchError::ScriptedNeedsGolden(t.task_id.clone()));
            }
        }
    }

    fs::create_dir_all(cfg.out_dir.join("episodes"))?;
    let blobs = BlobStore::open(cfg.out_dir.join("blobs"))?;
    let planner = profile.planner()?;
    let base_env = Environment::new(screen_pack);

    // Stable task order for deterministic reports.
    let mut ordered: Vec<&TaskSpec> = tasks.tasks.iter().collect();
    ordered.sort_by(|a, b| a.task_id.cmp(&b.task_id));

    let jobs = cfg.jobs.max(1);
    let results: Vec<TaskResult> = if jobs == 1 {
        ordered
            .iter()
            .map(|t| run_one_task(t, &base_env, &planner, &profile.device_id, cfg, Some(blobs.clone())))
            .collect()
    } else {
        let slots: Mutex<Vec<Option<TaskResult>>> =
            Mutex::new((0..ordered.len()).map(|_| None).collect());
        let next: Mutex<usize> = Mutex::new(0);
        std::thread::scope(|scope| {
            for _ in 0..jobs.min(ordered.len()) {
                scope.spawn(|| loop {
                    let idx = {
                        let mut n = next.lock().unwrap();
                        if *n >= ordered.len() {
                            break;
                        }
                        let i = *n;
                        *n += 1;
                        i
                    };
                    let result = run_one_task(
                        ordered[idx],
                        &base_env,
                        &planner,
                        &profile.device_id,
                        cfg,
                        Some(blobs.clone()),
                    );
                    slots.lock().unwrap()[idx] = Some(result);
                });
            }
        });
        slots
            .into_inner()
            .unwrap()
            .into_iter()
            .map(|r| r.expect("every task slot filled"))
            .collect()
    };

    let mut outcomes = Vec::with_capacity(results.len());
    let mut episode_paths = Vec::with_capacity(results.len());
    for (task, result) in ordered.iter().zip(results) {
        let path = cfg.out_dir.join("episodes").join(format!("{}.json", task.task_id));
        result.episode.save(&path).map_err(|e| BenchError::Io(std::io::Error::other(e.to_string())))?;
        episode_paths.push(path);
        outcomes.push(result.outcome);
    }

    let report = aggregate(&outcomes, &tasks.tasks)?;
    fs::write(
        cfg.out_dir.join("report.json"),
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    fs::write(cfg.out_dir.join("report.txt"), report.to_text())?;
    fs::write(
        cfg.out_dir.join("outcomes.json"),
        serde_json::to_string_pretty(&outcomes).expect("outcomes serialize"),
    )?;

    Ok(BenchRunOutput {
        report,
        outcomes,
        episode_paths,
    })
}

/// Run a single task by id (the `run` subcommand path).
pub fn run_single(
    task_id: &str,
    tasks: &TaskPack,
    screen_pack: std::sync::Arc<crate::sim::pack::ScreenPack>,
    profile: &DeviceProfile,
    cfg: &BenchConfig,
) -> Result<(TaskOutcome, PathBuf), BenchError> {
    if cfg.budget == Some(0) {
        return Err(BenchError::ZeroBudget);
    }
    let task = tasks
        .task(task_id)
        .ok_or_else(|| BenchError::UnknownTask(task_id.to_string()))?;
    if cfg.agent == AgentKind::Scripted && task.golden_trajectory.is_none() {
        return Err(BenchError::ScriptedNeedsGolden(task.task_id.clone()));
    }
    fs::create_dir_all(cfg.out_dir.join("episodes"))?;
    let blobs = BlobStore::open(cfg.out_dir.join("blobs"))?;
    let planner = profile.planner()?;
    let base_env = Environment::new(screen_pack);
    let result = run_one_task(task, &base_env, &planner, &profile.device_id, cfg, Some(blobs));
    let path = cfg.out_dir.join("episodes").join(format!("{}.json", task.task_id));
    result
        .episode
        .save(&path)
        .map_err(|e| BenchError::Io(std::io::Error::other(e.to_string())))?;
    Ok((result.outcome, path))
}
