//! The discrete action space and its translation into arm trajectories,
//! including the three physically challenging actions (back, exit, text)
//! with gesture-first execution and grounding fallback.

pub mod execute;
pub mod keyboard;
pub mod swipe;

use serde::{Deserialize, Serialize};

use crate::geom::{Direction, ScreenDims};

pub use execute::{execute, ExecutionContext, ExecutionReport, OutcomeSummary};
pub use keyboard::{
    localize_keyboard, plan_text_input, KeyTap, KeyboardLayout, LayoutCache, TapTarget,
};
pub use swipe::{resolve_swipe, synthesize_back, synthesize_exit, SwipeDistance};

#[derive(Debug, thiserror::Error)]
pub enum ActionError {
    #[error("coordinates ({x}, {y}) are outside the {w}x{h} screen")]
    CoordsOutOfBounds { x: i32, y: i32, w: u32, h: u32 },
    #[error("swipe end ({x:.1}, {y:.1}) falls outside the {w}x{h} screen; refusing to clamp")]
    SwipeEndOutOfBounds { x: f64, y: f64, w: u32, h: u32 },
    #[error("text action requires non-empty text")]
    EmptyText,
    #[error("no {action} affordance found for grounding fallback")]
    FallbackNotFound { action: String },
    #[error("keyboard region not found in observation")]
    KeyboardRegionNotFound,
    #[error("anchor key `{0}` not found (or ambiguous) inside the keyboard region")]
    AnchorNotFound(String),
    #[error("anchor keys give non-positive pitch ({0} px)")]
    NonPositivePitch(i32),
    #[error("keyboard rows give non-positive row spacing ({0} px)")]
    NonPositiveRowSpacing(i32),
    #[error("character `{ch}` at index {index} is not reachable on this layout")]
    UnreachableCharacter { ch: char, index: usize },
    #[error(transparent)]
    Arm(#[from] crate::arm::ArmError),
    #[error(transparent)]
    Perception(#[from] crate::perception::PerceptionError),
    #[error(transparent)]
    Env(#[from] crate::sim::env::EnvError),
    #[error("layout cache io error: {0}")]
    CacheIo(#[from] std::io::Error),
    #[error("layout cache is malformed: {0}")]
    CacheFormat(String),
}

/// The closed environment action space. Every agent decision must be one of
/// these five variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ActionSpec {
    Tap { x: i32, y: i32 },
    Swipe {
        x: i32,
        y: i32,
        direction: Direction,
        distance: SwipeDistance,
    },
    Text { text: String },
    Back,
    Exit,
}

impl ActionSpec {
    /// Enforce the structural invariants: coordinates on-screen, non-empty
    /// text.
    pub fn validate(&self, dims: ScreenDims) -> Result<(), ActionError> {
        let check = |x: i32, y: i32| {
            if x < 0 || y < 0 || x >= dims.width as i32 || y >= dims.height as i32 {
                Err(ActionError::CoordsOutOfBounds {
                    x,
                    y,
                    w: dims.width,
                    h: dims.height,
                })
            } else {
                Ok(())
            }
        };
        match self {
            ActionSpec::Tap { x, y } => check(*x, *y),
            ActionSpec::Swipe { x, y, .. } => check(*x, *y),
            ActionSpec::Text { text } => {
                if text.is_empty() {
                    Err(ActionError::EmptyText)
                } else {
                    Ok(())
                }
            }
            ActionSpec::Back | ActionSpec::Exit => Ok(()),
        }
    }

    /// Human-readable abstract form, used in episode records.
    pub fn describe(&self) -> String {
        match self {
            ActionSpec::Tap { x, y } => format!("tap ({x}, {y})"),
            ActionSpec::Swipe {
                x,
                y,
                direction,
                distance,
            } => format!("swipe ({x}, {y}, {direction}, {distance})"),
            ActionSpec::Text { text } => format!("text ({text})"),
            ActionSpec::Back => "back".to_string(),
            ActionSpec::Exit => "exit".to_string(),
        }
    }
}
