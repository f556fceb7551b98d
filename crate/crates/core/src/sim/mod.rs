//! Deterministic simulated smartphone: screen packs, gesture classification,
//! rendering, and the environment state machine.

pub mod env;
pub mod gesture;
pub mod keyboard;
pub mod pack;
pub mod render;

pub use env::{
    screen_delta, Environment, EnvError, ResetOrigin, ScreenDelta, ScreenObservation,
    TransitionResult,
};
pub use gesture::{classify, GestureClass, TouchSample, TouchTrace, TraceError};
pub use pack::{
    load_pack, parse_pack, ElementKind, GuiElement, KeyboardSpec, KeySpec, PackError, ScreenPack,
    ScreenSpec, TransitionRule, Trigger,
};
