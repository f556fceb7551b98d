//! Benchmark metrics: success rate, completion rate, and step efficiency,
//! aggregated by task set, category, and level.
//!
//! Definitions, per task T_i with golden (human) step count HStep_i and
//! agent step counts AStep_i:
//!
//! * SR = S_n / N over a subset (exact integer counts kept).
//! * CR_ti = min(1, AStep_i / HStep_i); the subset aggregate averages the
//!   tasks that did NOT fully succeed and is not-applicable when every
//!   task succeeded.
//! * SE_ti = HStep_i / AStep_i; the subset aggregate averages successful
//!   tasks only and is not-applicable when none succeeded.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bench::task::{Category, Level, TaskSet, TaskSpec};

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("cannot compute a rate over an empty outcome set")]
    EmptyOutcomes,
    #[error("outcome for `{0}` does not join to any task")]
    UnknownTask(String),
    #[error("outcome for `{task_id}` violates an invariant: {message}")]
    BadOutcome { task_id: String, message: String },
}

/// Result of judging one task run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskOutcome {
    pub task_id: String,
    pub success: bool,
    /// AStep_i: steps successfully completed by the agent.
    pub agent_steps_successful: u32,
    /// Total steps the agent executed (>= successful).
    pub agent_steps_total: u32,
    /// Free-form diagnostics (crash reasons, budget exhaustion, ...).
    #[serde(default)]
    pub diagnostics: Option<String>,
}

impl TaskOutcome {
    fn check(&self) -> Result<(), MetricsError> {
        if self.agent_steps_total < self.agent_steps_successful {
            return Err(MetricsError::BadOutcome {
                task_id: self.task_id.clone(),
                message: "total steps < successful steps".into(),
            });
        }
        if self.success && self.agent_steps_successful == 0 {
            return Err(MetricsError::BadOutcome {
                task_id: self.task_id.clone(),
                message: "successful task must have at least one successful step".into(),
            });
        }
        Ok(())
    }
}

/// Success rate as exact counts plus the ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessRate {
    pub successes: u32,
    pub total: u32,
    pub ratio: f64,
}

impl std::fmt::Display for SuccessRate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.successes, self.total)
    }
}

/// SR = S_n / N.
pub fn success_rate(outcomes: &[TaskOutcome]) -> Result<SuccessRate, MetricsError> {
    if outcomes.is_empty() {
        return Err(MetricsError::EmptyOutcomes);
    }
    for o in outcomes {
        o.check()?;
    }
    let successes = outcomes.iter().filter(|o| o.success).count() as u32;
    let total = outcomes.len() as u32;
    Ok(SuccessRate {
        successes,
        total,
        ratio: successes as f64 / total as f64,
    })
}

/// Per-task completion rate, clamped to 1: longer-but-valid paths do not
/// earn more than full completion.
pub fn completion_rate_task(outcome: &TaskOutcome, task: &TaskSpec) -> f64 {
    (outcome.agent_steps_successful as f64 / task.golden_steps as f64).min(1.0)
}

/// Per-task step efficiency; only meaningful for successful tasks.
pub fn step_efficiency_task(outcome: &TaskOutcome, task: &TaskSpec) -> f64 {
    task.golden_steps as f64 / outcome.agent_steps_successful as f64
}

/// Per-task values plus the subset aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRates {
    pub per_task: Vec<(String, f64)>,
    /// Mean CR over the tasks that did not fully succeed; None when every
    /// task in the subset succeeded (the tables' "-" marker).
    pub subset: Option<f64>,
}

/// CR_ti for every outcome; aggregate over non-successful tasks.
pub fn completion_rate(
    outcomes: &[TaskOutcome],
    tasks: &[TaskSpec],
) -> Result<CompletionRates, MetricsError> {
    if outcomes.is_empty() {
        return Err(MetricsError::EmptyOutcomes);
    }
    let by_id: BTreeMap<&str, &TaskSpec> =
        tasks.iter().map(|t| (t.task_id.as_str(), t)).collect();
    let mut per_task = Vec::with_capacity(outcomes.len());
    let mut failed_sum = 0.0;
    let mut failed_n = 0u32;
    for o in outcomes {
        o.check()?;
        let task = by_id
            .get(o.task_id.as_str())
            .ok_or_else(|| MetricsError::UnknownTask(o.task_id.clone()))?;
        let cr = completion_rate_task(o, task);
        per_task.push((o.task_id.clone(), cr));
        if !o.success {
            failed_sum += cr;
            failed_n += 1;
        }
    }
    let subset = if failed_n == 0 {
        None
    } else {
        Some(failed_sum / failed_n as f64)
    };
    Ok(CompletionRates { per_task, subset })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepEfficiencies {
    /// (task_id, SE_ti) for successful tasks.
    pub per_task: Vec<(String, f64)>,
    /// Mean SE over successes; None when the subset has no successes.
    pub subset: Option<f64>,
}

/// SE over successfully completed tasks only.
pub fn step_efficiency(
    outcomes: &[TaskOutcome],
    tasks: &[TaskSpec],
) -> Result<StepEfficiencies, MetricsError> {
    let by_id: BTreeMap<&str, &TaskSpec> =
        tasks.iter().map(|t| (t.task_id.as_str(), t)).collect();
    let mut per_task = Vec::new();
    let mut sum = 0.0;
    for o in outcomes.iter().filter(|o| o.success) {
        o.check()?;
        let task = by_id
            .get(o.task_id.as_str())
            .ok_or_else(|| MetricsError::UnknownTask(o.task_id.clone()))?;
        let se = step_efficiency_task(o, task);
        per_task.push((o.task_id.clone(), se));
        sum += se;
    }
    let subset = if per_task.is_empty() {
        None
    } else {
        Some(sum / per_task.len() as f64)
    };
    Ok(StepEfficiencies { per_task, subset })
}

/// One aggregated row of the report. `category`/`level` are None for rollup
/// rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetRow {
    pub set: TaskSet,
    pub category: Option<Category>,
    pub level: Option<Level>,
    pub task_count: usize,
    pub sr: SuccessRate,
    /// None renders as "-" (all tasks in the subset succeeded).
    pub cr: Option<f64>,
    /// None renders as "-" (no task in the subset succeeded).
    pub se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Set x level rollups (single-app) and the cross-app overall row.
    pub overview: Vec<SubsetRow>,
    /// Set x category x level rows (single-app), set x category (cross-app).
    pub by_category: Vec<SubsetRow>,
}

fn row_for(
    set: TaskSet,
    category: Option<Category>,
    level: Option<Level>,
    outcomes: &[&TaskOutcome],
    tasks: &[TaskSpec],
) -> Result<SubsetRow, MetricsError> {
    let owned: Vec<TaskOutcome> = outcomes.iter().map(|o| (*o).clone()).collect();
    let sr = success_rate(&owned)?;
    let cr = completion_rate(&owned, tasks)?.subset;
    let se = step_efficiency(&owned, tasks)?.subset;
    Ok(SubsetRow {
        set,
        category,
        level,
        task_count: owned.len(),
        sr,
        cr,
        se,
    })
}

/// Aggregate outcomes into the report layout: per-set/level overview plus
/// per-category breakdowns.
pub fn aggregate(
    outcomes: &[TaskOutcome],
    tasks: &[TaskSpec],
) -> Result<MetricsReport, MetricsError> {
    let by_id: BTreeMap<&str, &TaskSpec> =
        tasks.iter().map(|t| (t.task_id.as_str(), t)).collect();
    for o in outcomes {
        if !by_id.contains_key(o.task_id.as_str()) {
            return Err(MetricsError::UnknownTask(o.task_id.clone()));
        }
    }
    let joined: Vec<(&TaskOutcome, &TaskSpec)> = outcomes
        .iter()
        .map(|o| (o, by_id[o.task_id.as_str()]))
        .collect();

    let levels = [Level::Simple, Level::Medium, Level::Hard];
    let mut overview = Vec::new();
    for set in [TaskSet::Standard, TaskSet::Challenging] {
        for level in levels {
            let subset: Vec<&TaskOutcome> = joined
                .iter()
                .filter(|(_, t)| t.set == set && t.level == Some(level))
                .map(|(o, _)| *o)
                .collect();
            if !subset.is_empty() {
                overview.push(row_for(set, None, Some(level), &subset, tasks)?);
            }
        }
    }
    let cross: Vec<&TaskOutcome> = joined
        .iter()
        .filter(|(_, t)| t.set == TaskSet::CrossApp)
        .map(|(o, _)| *o)
        .collect();
    if !cross.is_empty() {
        overview.push(row_for(TaskSet::CrossApp, None, None, &cross, tasks)?);
    }

    let mut by_category = Vec::new();
    let mut categories: Vec<Category> = joined.iter().map(|(_, t)| t.category).collect();
    categories.sort();
    categories.dedup();
    for set in [TaskSet::Standard, TaskSet::Challenging] {
        for &category in &categories {
            for level in levels {
                let subset: Vec<&TaskOutcome> = joined
                    .iter()
                    .filter(|(_, t)| {
                        t.set == set && t.category == category && t.level == Some(level)
                    })
                    .map(|(o, _)| *o)
                    .collect();
                if !subset.is_empty() {
                    by_category.push(row_for(set, Some(category), Some(level), &subset, tasks)?);
                }
            }
        }
    }
    for &category in &categories {
        let subset: Vec<&TaskOutcome> = joined
            .iter()
            .filter(|(_, t)| t.set == TaskSet::CrossApp && t.category == category)
            .map(|(o, _)| *o)
            .collect();
        if !subset.is_empty() {
            by_category.push(row_for(TaskSet::CrossApp, Some(category), None, &subset, tasks)?);
        }
    }

    Ok(MetricsReport {
        overview,
        by_category,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.3}"),
        None => "-".to_string(),
    }
}

impl MetricsReport {
    /// Aligned-text rendering of the report.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let header = format!(
            "{:<14} {:<24} {:<8} {:>6} {:>9} {:>7} {:>7}\n",
            "Set", "Category", "Level", "Tasks", "SR", "CR", "SE"
        );
        out.push_str(&header);
        out.push_str(&"-".repeat(header.len() - 1));
        out.push('\n');
        for row in self.overview.iter().chain(self.by_category.iter()) {
            out.push_str(&format!(
                "{:<14} {:<24} {:<8} {:>6} {:>9} {:>7} {:>7}\n",
                row.set.display(),
                row.category.map(|c| c.display()).unwrap_or("(all)"),
                row.level.map(|l| l.display()).unwrap_or("-"),
                row.task_count,
                format!("{} ({:.3})", row.sr, row.sr.ratio),
                fmt_opt(row.cr),
                fmt_opt(row.se),
            ));
        }
        out
    }
}
