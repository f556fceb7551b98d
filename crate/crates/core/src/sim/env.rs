//! The simulated phone: owns current screen, variables, keyboard state and
//! the typed buffer; consumes touch traces and produces observations.
//!
//! An environment is single-owner mutable state. Clones are fully
//! independent (they share only the immutable pack and the render-ref
//! memo, which is keyed by content and therefore safe to share).

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::blob::{BlobRef, RasterImage};
use crate::geom::{PxPoint, ScreenDims};
use crate::sim::gesture::{classify, GestureClass, TouchTrace, TraceError};
use crate::sim::keyboard::{apply_key, hit_key, KeyboardState, KeyPress};
use crate::sim::pack::{
    Effect, GuiElement, ScreenPack, ScreenSpec, TransitionRule, Trigger, TEXT_BUFFER_VAR,
};
use crate::sim::render::render_screen;

#[derive(Debug, thiserror::Error)]
pub enum EnvError {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("unknown app id `{0}`")]
    UnknownApp(String),
}

/// What the agent sees at one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenObservation {
    pub step_index: u64,
    pub raster_ref: BlobRef,
    /// Ground-truth scene graph; present in sim mode, absent in live mode.
    pub scene: Option<Vec<GuiElement>>,
    pub dims: ScreenDims,
}

/// Outcome of dispatching one touch trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionResult {
    /// True iff the visible state (screen, variables, keyboard, buffer)
    /// differs after the dispatch.
    pub changed: bool,
    pub from: String,
    pub to: String,
    pub classified_gesture: GestureClass,
}

/// Difference between two observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenDelta {
    pub unchanged: bool,
    /// Element ids present in `b` but not `a` (when both scenes are known).
    pub added: Vec<String>,
    /// Element ids present in `a` but not `b`.
    pub removed: Vec<String>,
}

/// Compare two observations. `unchanged` relies on content-addressed raster
/// references, which in sim mode is equivalent to pixel identity.
pub fn screen_delta(a: &ScreenObservation, b: &ScreenObservation) -> ScreenDelta {
    let unchanged = a.raster_ref == b.raster_ref;
    let (added, removed) = match (&a.scene, &b.scene) {
        (Some(sa), Some(sb)) => {
            let ids_a: Vec<&str> = sa.iter().map(|e| e.element_id.as_str()).collect();
            let ids_b: Vec<&str> = sb.iter().map(|e| e.element_id.as_str()).collect();
            (
                ids_b
                    .iter()
                    .filter(|id| !ids_a.contains(id))
                    .map(|s| s.to_string())
                    .collect(),
                ids_a
                    .iter()
                    .filter(|id| !ids_b.contains(id))
                    .map(|s| s.to_string())
                    .collect(),
            )
        }
        _ => (Vec::new(), Vec::new()),
    };
    ScreenDelta {
        unchanged,
        added,
        removed,
    }
}

/// Reset origin per task type: cross-app tasks start at the phone home
/// screen, single-app tasks at their app's home screen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ResetOrigin {
    PhoneHome,
    AppHome { app_id: String },
}

type RenderMemo = Arc<Mutex<HashMap<u64, BlobRef>>>;

#[derive(Debug, Clone)]
pub struct Environment {
    pack: Arc<ScreenPack>,
    current: String,
    variables: BTreeMap<String, String>,
    keyboard: KeyboardState,
    text_buffer: String,
    steps: u64,
    /// Memo of state-fingerprint -> raster ref, shared across clones.
    render_memo: RenderMemo,
}

impl Environment {
    /// Position a fresh environment at the pack's declared home screen.
    pub fn new(pack: Arc<ScreenPack>) -> Self {
        let variables = pack.variables.clone();
        let current = pack.home_screen.clone();
        Self {
            pack,
            current,
            variables,
            keyboard: KeyboardState::default(),
            text_buffer: String::new(),
            steps: 0,
            render_memo: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    pub fn pack(&self) -> &Arc<ScreenPack> {
        &self.pack
    }

    pub fn dims(&self) -> ScreenDims {
        self.pack.dims
    }

    pub fn current_screen_id(&self) -> &str {
        &self.current
    }

    pub fn variables(&self) -> &BTreeMap<String, String> {
        &self.variables
    }

    pub fn text_buffer(&self) -> &str {
        &self.text_buffer
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps
    }

    fn screen(&self) -> &ScreenSpec {
        self.pack
            .screen(&self.current)
            .expect("current screen always exists: validated at load")
    }

    /// Canonical encoding of everything that affects the rendered raster.
    /// Also used as the ground-truth state identity for outcome judging.
    pub fn state_fingerprint(&self) -> String {
        let mut s = String::new();
        s.push_str(&self.current);
        s.push('\u{1f}');
        for (k, v) in &self.variables {
            s.push_str(k);
            s.push('=');
            s.push_str(v);
            s.push(';');
        }
        s.push('\u{1f}');
        s.push_str(&self.text_buffer);
        s.push('\u{1f}');
        s.push_str(if self.keyboard.symbols_layer { "sym" } else { "abc" });
        s.push(if self.keyboard.shift { '^' } else { '_' });
        s
    }

    /// The scene graph the mock grounder sees: screen elements plus, when
    /// the keyboard is up, a `keyboard` panel icon and one text element per
    /// key showing its current-layer symbol.
    pub fn scene(&self) -> Vec<GuiElement> {
        let screen = self.screen();
        let mut scene = screen.elements.clone();
        if screen.keyboard_visible {
            if let Some(kb) = &self.pack.keyboard {
                scene.push(GuiElement {
                    element_id: "__keyboard_panel".into(),
                    kind: crate::sim::pack::ElementKind::Icon,
                    label: "keyboard".into(),
                    bbox: kb.region,
                });
                for (row_ix, row) in kb.rows.iter().enumerate() {
                    for (col_ix, key) in row.iter().enumerate() {
                        let shown = self.keyboard.shown_symbol(row_ix, col_ix, key.symbol);
                        scene.push(GuiElement {
                            element_id: format!("__key_{row_ix}_{col_ix}"),
                            kind: crate::sim::pack::ElementKind::Text,
                            label: shown.to_string(),
                            bbox: key.bbox,
                        });
                    }
                }
                // Special keys use glyph labels with no ASCII letters so
                // single-letter anchor queries stay unambiguous in-region.
                let specials = [
                    ("__key_shift", "\u{21e7}", &kb.shift),
                    ("__key_symbols", if self.keyboard.symbols_layer { "=\\<" } else { "?123" }, &kb.symbols_toggle),
                    ("__key_space", "\u{2423}", &kb.space),
                    ("__key_backspace", "\u{232b}", &kb.backspace),
                    ("__key_return", "\u{21b5}", &kb.return_key),
                ];
                for (id, label, key) in specials {
                    scene.push(GuiElement {
                        element_id: id.into(),
                        kind: crate::sim::pack::ElementKind::Text,
                        label: label.into(),
                        bbox: key.bbox,
                    });
                }
            }
        }
        scene
    }

    /// Render the current screen. Deterministic; not memoized (callers that
    /// only need the ref should use `observe`).
    pub fn render_current(&self) -> RasterImage {
        render_screen(
            &self.pack,
            self.screen(),
            &self.variables,
            &self.keyboard,
            &self.text_buffer,
        )
    }

    fn current_raster_ref(&self) -> BlobRef {
        let key = crate::blob::stable_hash64(&self.state_fingerprint());
        if let Some(r) = self.render_memo.lock().unwrap().get(&key) {
            return r.clone();
        }
        let r = self.render_current().blob_ref();
        self.render_memo.lock().unwrap().insert(key, r.clone());
        r
    }

    /// Observe the current screen. Repeated calls without intervening
    /// touches return equal observations.
    pub fn observe(&self) -> ScreenObservation {
        ScreenObservation {
            step_index: self.steps,
            raster_ref: self.current_raster_ref(),
            scene: Some(self.scene()),
            dims: self.pack.dims,
        }
    }

    /// Reset to an origin, restoring all declared variable values and
    /// clearing keyboard/buffer state.
    pub fn reset(&mut self, origin: &ResetOrigin) -> Result<(), EnvError> {
        let target = match origin {
            ResetOrigin::PhoneHome => self.pack.home_screen.clone(),
            ResetOrigin::AppHome { app_id } => self
                .pack
                .apps
                .get(app_id)
                .cloned()
                .ok_or_else(|| EnvError::UnknownApp(app_id.clone()))?,
        };
        self.current = target;
        self.variables = self.pack.variables.clone();
        self.keyboard = KeyboardState::default();
        self.text_buffer.clear();
        self.steps = 0;
        Ok(())
    }

    fn guard_passes(&self, rule: &TransitionRule) -> bool {
        match &rule.guard {
            None => true,
            Some(g) => {
                let actual = if g.var == TEXT_BUFFER_VAR {
                    Some(self.text_buffer.as_str())
                } else {
                    self.variables.get(&g.var).map(|s| s.as_str())
                };
                actual == Some(g.equals.as_str())
            }
        }
    }

    /// Pick the unique applicable rule for a trigger: a passing guarded rule
    /// wins over the unguarded default. Load-time validation guarantees at
    /// most one guarded rule can pass.
    fn matching_rule(&self, want: &Trigger) -> Option<&TransitionRule> {
        let screen = self.screen();
        let candidates: Vec<&TransitionRule> = screen
            .transitions
            .iter()
            .filter(|r| &r.trigger == want)
            .collect();
        candidates
            .iter()
            .find(|r| r.guard.is_some() && self.guard_passes(r))
            .or_else(|| candidates.iter().find(|r| r.guard.is_none()))
            .copied()
    }

    fn apply_rule(&mut self, rule: &TransitionRule) {
        let effects: Vec<Effect> = rule.effects.clone();
        let target = rule.target.clone();
        for e in effects {
            let value = if e.value == format!("${TEXT_BUFFER_VAR}") {
                self.text_buffer.clone()
            } else {
                e.value
            };
            self.variables.insert(e.var, value);
        }
        if target != self.current {
            self.current = target;
            // Leaving a screen dismisses the keyboard overlay state.
            self.keyboard = KeyboardState::default();
            self.text_buffer.clear();
        }
    }

    /// Topmost element under a point (later elements draw over earlier ones).
    fn element_at(&self, p: PxPoint) -> Option<&GuiElement> {
        self.screen().elements.iter().rev().find(|e| e.bbox.contains(p))
    }

    /// Dispatch one touch trace: classify it, apply the unique matching
    /// transition (or keyboard key press), or no-op.
    pub fn dispatch_touch(&mut self, trace: &TouchTrace) -> Result<TransitionResult, EnvError> {
        trace.validate(self.pack.dims)?;
        let gesture = classify(trace, self.pack.dims);
        let from = self.current.clone();
        let before = self.state_fingerprint();

        match gesture {
            GestureClass::Noise => {}
            GestureClass::Tap { at } => self.apply_tap(at),
            GestureClass::Swipe { direction } => {
                if let Some(rule) = self.matching_rule(&Trigger::Swipe { direction }).cloned() {
                    self.apply_rule(&rule);
                }
            }
            GestureClass::BackGesture => {
                if self.screen().supports_edge_back_gesture {
                    if let Some(rule) = self.matching_rule(&Trigger::BackGesture).cloned() {
                        self.apply_rule(&rule);
                    }
                }
            }
            GestureClass::ExitGesture => {
                if self.screen().supports_bottom_exit_gesture {
                    if let Some(rule) = self.matching_rule(&Trigger::ExitGesture).cloned() {
                        self.apply_rule(&rule);
                    }
                }
            }
        }

        self.steps += 1;
        Ok(TransitionResult {
            changed: self.state_fingerprint() != before,
            from,
            to: self.current.clone(),
            classified_gesture: gesture,
        })
    }

    fn apply_tap(&mut self, at: PxPoint) {
        let screen = self.screen();
        if screen.keyboard_visible {
            if let Some(kb) = self.pack.keyboard.clone() {
                if kb.region.contains(at) {
                    let press = hit_key(&kb, self.keyboard, at);
                    if press != KeyPress::None {
                        let commit = apply_key(press, &mut self.text_buffer, &mut self.keyboard);
                        if commit {
                            if let Some(rule) = self.matching_rule(&Trigger::TextCommit).cloned() {
                                self.apply_rule(&rule);
                            }
                        }
                        return;
                    }
                    return; // dead zone inside the keyboard panel
                }
            }
        }
        if let Some(element_id) = self.element_at(at).map(|e| e.element_id.clone()) {
            if let Some(rule) = self
                .matching_rule(&Trigger::TapOn {
                    element: element_id,
                })
                .cloned()
            {
                self.apply_rule(&rule);
            }
        }
    }
}
