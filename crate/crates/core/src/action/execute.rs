//! Action execution: translate one environment action into arm trajectories
//! and dispatch them, with gesture-first back/exit and grounding fallback.

use serde::{Deserialize, Serialize};

use crate::action::keyboard::{localize_keyboard, plan_text_input, LayoutCache};
use crate::action::swipe::{resolve_swipe, synthesize_back, synthesize_exit};
use crate::action::{ActionError, ActionSpec};
use crate::arm::trajectory::{ContactTrajectory, TouchPlanner};
use crate::geom::{round_half_up, PxPoint};
use crate::perception::{center_of, Grounder};
use crate::sim::env::{screen_delta, Environment, ScreenObservation};

/// Everything one executed action needs: exclusive access to the
/// environment, the calibrated planner, a grounder, and the per-device
/// layout cache.
pub struct ExecutionContext<'a> {
    pub env: &'a mut Environment,
    pub planner: &'a TouchPlanner,
    pub grounder: &'a dyn Grounder,
    pub layouts: &'a mut LayoutCache,
    pub device_id: &'a str,
}

/// Pixel-space summary of one dispatched trajectory, in the episode
/// hardware-action grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum HardwareOp {
    Tap { at: (i32, i32) },
    Swipe { from: (i32, i32), to: (i32, i32) },
}

impl HardwareOp {
    /// Render in the dataset grammar: `tap at (x, y)` or
    /// `swipe (x1,y1)->(x2,y2)`.
    pub fn to_line(&self) -> String {
        match self {
            HardwareOp::Tap { at } => format!("tap at ({}, {})", at.0, at.1),
            HardwareOp::Swipe { from, to } => {
                format!("swipe ({},{})->({},{})", from.0, from.1, to.0, to.1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareRecord {
    pub op: HardwareOp,
    pub trajectory: ContactTrajectory,
}

/// Net effect of the action on the environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSummary {
    pub changed: bool,
    pub from_screen: String,
    pub to_screen: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionReport {
    pub action: ActionSpec,
    pub hardware: Vec<HardwareRecord>,
    pub fallback_used: bool,
    pub outcome: OutcomeSummary,
}

fn dispatch_tap(
    ctx: &mut ExecutionContext<'_>,
    at: (i32, i32),
) -> Result<HardwareRecord, ActionError> {
    let traj = ctx.planner.plan_tap(at.into())?;
    let trace = ctx.planner.trace_of(&traj)?;
    ctx.env.dispatch_touch(&trace)?;
    Ok(HardwareRecord {
        op: HardwareOp::Tap { at },
        trajectory: traj,
    })
}

fn dispatch_swipe(
    ctx: &mut ExecutionContext<'_>,
    start: PxPoint,
    end: PxPoint,
) -> Result<HardwareRecord, ActionError> {
    let traj = ctx.planner.plan_swipe(start, end)?;
    let trace = ctx.planner.trace_of(&traj)?;
    ctx.env.dispatch_touch(&trace)?;
    Ok(HardwareRecord {
        op: HardwareOp::Swipe {
            from: (round_half_up(start.x), round_half_up(start.y)),
            to: (round_half_up(end.x), round_half_up(end.y)),
        },
        trajectory: traj,
    })
}

/// Locate a back/exit affordance for the grounding fallback: try text
/// grounding for each query, then icon labels.
fn find_fallback_target(
    grounder: &dyn Grounder,
    obs: &ScreenObservation,
    queries: &[&str],
) -> Option<(i32, i32)> {
    for q in queries {
        if let Ok(hits) = grounder.ground_text(obs, q) {
            if let Some(b) = hits.first() {
                return Some(center_of(b));
            }
        }
    }
    if let Ok(icons) = grounder.detect_icons(obs) {
        for q in queries {
            if let Some(icon) = icons.iter().find(|i| {
                i.label
                    .as_deref()
                    .map(|l| l.to_lowercase().contains(q))
                    .unwrap_or(false)
            }) {
                return Some(center_of(&icon.bbox));
            }
        }
    }
    None
}

fn execute_gesture_with_fallback(
    ctx: &mut ExecutionContext<'_>,
    action: &ActionSpec,
    start: PxPoint,
    end: PxPoint,
    fallback_queries: &[&str],
    hardware: &mut Vec<HardwareRecord>,
) -> Result<bool, ActionError> {
    let before = ctx.env.observe();
    hardware.push(dispatch_swipe(ctx, start, end)?);
    let after = ctx.env.observe();
    if !screen_delta(&before, &after).unchanged {
        return Ok(false);
    }
    // Gesture had no effect; ground a button instead.
    let target = find_fallback_target(ctx.grounder, &after, fallback_queries).ok_or_else(|| {
        ActionError::FallbackNotFound {
            action: action.describe(),
        }
    })?;
    hardware.push(dispatch_tap(ctx, target)?);
    Ok(true)
}

/// Execute one environment action end to end. Returns the full report with
/// every dispatched trajectory in order.
pub fn execute(
    action: &ActionSpec,
    ctx: &mut ExecutionContext<'_>,
) -> Result<ExecutionReport, ActionError> {
    let dims = ctx.env.dims();
    action.validate(dims)?;

    let pre = ctx.env.observe();
    let from_screen = ctx.env.current_screen_id().to_string();
    let mut hardware = Vec::new();
    let mut fallback_used = false;

    match action {
        ActionSpec::Tap { x, y } => {
            hardware.push(dispatch_tap(ctx, (*x, *y))?);
        }
        ActionSpec::Swipe {
            x,
            y,
            direction,
            distance,
        } => {
            let (start, end) = resolve_swipe(*x, *y, *direction, *distance, dims)?;
            hardware.push(dispatch_swipe(ctx, start, end)?);
        }
        ActionSpec::Back => {
            let (start, end) = synthesize_back(dims);
            fallback_used =
                execute_gesture_with_fallback(ctx, action, start, end, &["back"], &mut hardware)?;
        }
        ActionSpec::Exit => {
            let (start, end) = synthesize_exit(dims);
            fallback_used = execute_gesture_with_fallback(
                ctx,
                action,
                start,
                end,
                &["exit", "close", "home"],
                &mut hardware,
            )?;
        }
        ActionSpec::Text { text } => {
            let layout = match ctx.layouts.get(ctx.device_id) {
                Some(l) => l.clone(),
                None => {
                    let l = localize_keyboard(&pre, ctx.grounder, ctx.device_id)?;
                    ctx.layouts.insert(l.clone())?;
                    l
                }
            };
            for tap in plan_text_input(text, &layout)? {
                hardware.push(dispatch_tap(ctx, tap.at)?);
            }
        }
    }

    let post = ctx.env.observe();
    Ok(ExecutionReport {
        action: action.clone(),
        hardware,
        fallback_used,
        outcome: OutcomeSummary {
            changed: !screen_delta(&pre, &post).unchanged,
            from_screen,
            to_screen: ctx.env.current_screen_id().to_string(),
        },
    })
}
