//! Replay fidelity: re-execute an episode's hardware action strings through
//! the simulator and check that the same screen sequence reproduces.

use crate::arm::trajectory::TouchPlanner;
use crate::bench::task::TaskSpec;
use crate::dataset::episode::EpisodeFile;
use crate::dataset::DatasetError;
use crate::geom::PxPoint;
use crate::sim::env::Environment;

/// A parsed hardware grammar line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HardwareLine {
    Tap { at: (i32, i32) },
    Swipe { from: (i32, i32), to: (i32, i32) },
    Noop,
}

fn parse_point_pair(s: &str) -> Option<(i32, i32)> {
    let inner = s.trim().strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// Parse one line of the grammar: `tap at (x, y)`,
/// `swipe (x1,y1)->(x2,y2)`, or `noop`.
pub fn parse_hardware_line(line: &str) -> Result<HardwareLine, DatasetError> {
    let line = line.trim();
    if line == "noop" {
        return Ok(HardwareLine::Noop);
    }
    if let Some(rest) = line.strip_prefix("tap at ") {
        if let Some(at) = parse_point_pair(rest) {
            return Ok(HardwareLine::Tap { at });
        }
    }
    if let Some(rest) = line.strip_prefix("swipe ") {
        if let Some((from_s, to_s)) = rest.split_once("->") {
            if let (Some(from), Some(to)) = (parse_point_pair(from_s), parse_point_pair(to_s)) {
                return Ok(HardwareLine::Swipe { from, to });
            }
        }
    }
    Err(DatasetError::BadHardwareLine(line.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReplayOutcome {
    /// Every step's observation matched the recorded screenshot.
    Match { steps: usize },
    Divergence {
        step: usize,
        expected: String,
        actual: String,
    },
}

impl ReplayOutcome {
    pub fn matched(&self) -> bool {
        matches!(self, ReplayOutcome::Match { .. })
    }
}

/// Re-run an episode's hardware actions from the task's reset origin and
/// compare the produced screen sequence against the recorded screenshots.
pub fn replay_episode(
    file: &EpisodeFile,
    task: &TaskSpec,
    env: &mut Environment,
    planner: &TouchPlanner,
) -> Result<ReplayOutcome, DatasetError> {
    env.reset(&task.reset_origin())?;
    for (i, step) in file.steps.iter().enumerate() {
        let obs = env.observe();
        if obs.raster_ref != step.screenshot {
            return Ok(ReplayOutcome::Divergence {
                step: i,
                expected: step.screenshot.to_string(),
                actual: obs.raster_ref.to_string(),
            });
        }
        for line in step.action_hardware.lines() {
            match parse_hardware_line(line)? {
                HardwareLine::Noop => {}
                HardwareLine::Tap { at } => {
                    let traj = planner.plan_tap(PxPoint::from(at))?;
                    let trace = planner.trace_of(&traj)?;
                    env.dispatch_touch(&trace)?;
                }
                HardwareLine::Swipe { from, to } => {
                    let traj = planner.plan_swipe(PxPoint::from(from), PxPoint::from(to))?;
                    let trace = planner.trace_of(&traj)?;
                    env.dispatch_touch(&trace)?;
                }
            }
        }
    }
    Ok(ReplayOutcome::Match {
        steps: file.steps.len(),
    })
}
