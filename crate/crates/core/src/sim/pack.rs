//! Screen-pack schema: the JSON description of a simulated phone.
//!
//! A pack is one document (`pack_version: 1`) holding every screen, the
//! transition graph between them, app home screens, initial variable values,
//! and an optional shared keyboard overlay. Loading validates all structural
//! invariants up front so the environment never has to.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geom::{BBox, Direction, ScreenDims};

pub const PACK_VERSION: u32 = 1;

/// Reserved variable name through which guards can observe the text buffer.
pub const TEXT_BUFFER_VAR: &str = "text_buffer";

#[derive(Debug, thiserror::Error)]
pub enum PackError {
    #[error("cannot read pack file: {0}")]
    Io(#[from] std::io::Error),
    #[error("pack schema violation at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("unsupported pack_version {0}, expected {PACK_VERSION}")]
    Version(u32),
    #[error("duplicate screen id `{0}`")]
    DuplicateScreen(String),
    #[error("screen `{screen}`: duplicate element id `{element}`")]
    DuplicateElement { screen: String, element: String },
    #[error("screen `{screen}`: transition targets unknown screen `{target}`")]
    DanglingTarget { screen: String, target: String },
    #[error("screen `{screen}`: element `{element}` bbox {detail}")]
    BadElementBox {
        screen: String,
        element: String,
        detail: String,
    },
    #[error("screen `{screen}`: trigger {trigger} can match more than one rule")]
    AmbiguousTrigger { screen: String, trigger: String },
    #[error("home screen `{0}` not present in pack")]
    MissingHome(String),
    #[error("app `{app}` home screen `{screen}` not present in pack")]
    MissingAppHome { app: String, screen: String },
    #[error("declared element_count {declared} but pack contains {actual}")]
    ElementCountMismatch { declared: u64, actual: u64 },
    #[error("keyboard {0}")]
    BadKeyboard(String),
}

fn schema_err(path: impl Into<String>, message: impl Into<String>) -> PackError {
    PackError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

/// The two element categories the perception layer distinguishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Icon,
    Text,
}

impl std::fmt::Display for ElementKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ElementKind::Icon => write!(f, "icon"),
            ElementKind::Text => write!(f, "text"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuiElement {
    pub element_id: String,
    pub kind: ElementKind,
    pub label: String,
    pub bbox: BBox,
}

/// What a transition rule listens for.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Trigger {
    TapOn { element: String },
    Swipe { direction: Direction },
    BackGesture,
    ExitGesture,
    TextCommit,
}

impl std::fmt::Display for Trigger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Trigger::TapOn { element } => write!(f, "tap_on({element})"),
            Trigger::Swipe { direction } => write!(f, "swipe({direction})"),
            Trigger::BackGesture => write!(f, "back_gesture"),
            Trigger::ExitGesture => write!(f, "exit_gesture"),
            Trigger::TextCommit => write!(f, "text_commit"),
        }
    }
}

/// Optional predicate on environment variables. The reserved name
/// `text_buffer` exposes the current typed text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guard {
    pub var: String,
    pub equals: String,
}

/// Variable assignment applied when a rule fires. A value of
/// `$text_buffer` substitutes the current buffer contents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Effect {
    pub var: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRule {
    pub trigger: Trigger,
    #[serde(default)]
    pub guard: Option<Guard>,
    pub target: String,
    #[serde(default)]
    pub effects: Vec<Effect>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenSpec {
    pub screen_id: String,
    pub elements: Vec<GuiElement>,
    pub transitions: Vec<TransitionRule>,
    #[serde(default = "default_true")]
    pub supports_edge_back_gesture: bool,
    #[serde(default = "default_true")]
    pub supports_bottom_exit_gesture: bool,
    #[serde(default)]
    pub keyboard_visible: bool,
}

fn default_true() -> bool {
    true
}

/// One key on the simulated keyboard: the letters-layer symbol plus its
/// hit box. The symbols-layer meaning of the same physical key comes from
/// the layer tables in [`crate::action::keys`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeySpec {
    pub symbol: char,
    pub bbox: BBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyboardSpec {
    /// Overlay bbox; all keys must sit inside it.
    pub region: BBox,
    /// Letter rows, top to bottom (q-row, a-row, z-row).
    pub rows: Vec<Vec<KeySpec>>,
    pub shift: KeySpec,
    pub symbols_toggle: KeySpec,
    pub space: KeySpec,
    pub backspace: KeySpec,
    pub return_key: KeySpec,
}

impl KeyboardSpec {
    pub fn special_keys(&self) -> [&KeySpec; 5] {
        [
            &self.shift,
            &self.symbols_toggle,
            &self.space,
            &self.backspace,
            &self.return_key,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenPack {
    pub pack_version: u32,
    pub pack_id: String,
    pub dims: ScreenDims,
    /// The phone's home screen (reset origin for cross-app tasks).
    pub home_screen: String,
    /// App id -> that app's home screen (reset origin for single-app tasks).
    #[serde(default)]
    pub apps: BTreeMap<String, String>,
    /// Declared initial variable values.
    #[serde(default)]
    pub variables: BTreeMap<String, String>,
    /// Declared total GUI element count across all screens, validated at load.
    pub element_count: u64,
    #[serde(default)]
    pub keyboard: Option<KeyboardSpec>,
    pub screens: Vec<ScreenSpec>,
}

impl ScreenPack {
    pub fn screen(&self, id: &str) -> Option<&ScreenSpec> {
        self.screens.iter().find(|s| s.screen_id == id)
    }

    /// Full structural validation; called by [`load_pack`] and by the
    /// synthetic builders before handing a pack out.
    pub fn validate(&self) -> Result<(), PackError> {
        if self.pack_version != PACK_VERSION {
            return Err(PackError::Version(self.pack_version));
        }
        if self.dims.width == 0 || self.dims.height == 0 {
            return Err(schema_err("dims", "width and height must be positive"));
        }
        let mut ids = HashSet::new();
        for screen in &self.screens {
            if !ids.insert(screen.screen_id.clone()) {
                return Err(PackError::DuplicateScreen(screen.screen_id.clone()));
            }
        }
        if !ids.contains(&self.home_screen) {
            return Err(PackError::MissingHome(self.home_screen.clone()));
        }
        for (app, home) in &self.apps {
            if !ids.contains(home) {
                return Err(PackError::MissingAppHome {
                    app: app.clone(),
                    screen: home.clone(),
                });
            }
        }
        let mut total_elements = 0u64;
        for screen in &self.screens {
            let mut element_ids = HashSet::new();
            for el in &screen.elements {
                total_elements += 1;
                if !element_ids.insert(el.element_id.clone()) {
                    return Err(PackError::DuplicateElement {
                        screen: screen.screen_id.clone(),
                        element: el.element_id.clone(),
                    });
                }
                if !el.bbox.is_valid() {
                    return Err(PackError::BadElementBox {
                        screen: screen.screen_id.clone(),
                        element: el.element_id.clone(),
                        detail: "is degenerate (min must be < max)".into(),
                    });
                }
                if !self.dims.contains_box(&el.bbox) {
                    return Err(PackError::BadElementBox {
                        screen: screen.screen_id.clone(),
                        element: el.element_id.clone(),
                        detail: format!(
                            "exceeds screen bounds {}x{}",
                            self.dims.width, self.dims.height
                        ),
                    });
                }
            }
            for rule in &screen.transitions {
                if !ids.contains(&rule.target) {
                    return Err(PackError::DanglingTarget {
                        screen: screen.screen_id.clone(),
                        target: rule.target.clone(),
                    });
                }
                if let Trigger::TapOn { element } = &rule.trigger {
                    if !element_ids.contains(element) {
                        return Err(schema_err(
                            format!("screens[{}].transitions", screen.screen_id),
                            format!("tap_on refers to unknown element `{element}`"),
                        ));
                    }
                }
            }
            check_trigger_uniqueness(screen)?;
        }
        if total_elements != self.element_count {
            return Err(PackError::ElementCountMismatch {
                declared: self.element_count,
                actual: total_elements,
            });
        }
        if let Some(kb) = &self.keyboard {
            validate_keyboard(kb, self.dims)?;
        }
        let any_keyboard_screen = self.screens.iter().any(|s| s.keyboard_visible);
        if any_keyboard_screen && self.keyboard.is_none() {
            return Err(PackError::BadKeyboard(
                "a screen sets keyboard_visible but the pack declares no keyboard".into(),
            ));
        }
        Ok(())
    }
}

/// Deterministic environments require that at most one rule can fire for a
/// classified gesture. Rules sharing a trigger must be discriminated by
/// guards on one common variable with pairwise-distinct values, plus at most
/// one unguarded default.
fn check_trigger_uniqueness(screen: &ScreenSpec) -> Result<(), PackError> {
    let mut groups: BTreeMap<String, Vec<&TransitionRule>> = BTreeMap::new();
    for rule in &screen.transitions {
        groups.entry(rule.trigger.to_string()).or_default().push(rule);
    }
    for (trigger, rules) in groups {
        if rules.len() == 1 {
            continue;
        }
        let unguarded = rules.iter().filter(|r| r.guard.is_none()).count();
        if unguarded > 1 {
            return Err(PackError::AmbiguousTrigger {
                screen: screen.screen_id.clone(),
                trigger,
            });
        }
        let guarded: Vec<&Guard> = rules.iter().filter_map(|r| r.guard.as_ref()).collect();
        let vars: HashSet<&str> = guarded.iter().map(|g| g.var.as_str()).collect();
        let values: HashSet<&str> = guarded.iter().map(|g| g.equals.as_str()).collect();
        if vars.len() > 1 || values.len() != guarded.len() {
            return Err(PackError::AmbiguousTrigger {
                screen: screen.screen_id.clone(),
                trigger,
            });
        }
    }
    Ok(())
}

fn validate_keyboard(kb: &KeyboardSpec, dims: ScreenDims) -> Result<(), PackError> {
    if !kb.region.is_valid() || !dims.contains_box(&kb.region) {
        return Err(PackError::BadKeyboard(
            "region is degenerate or exceeds screen bounds".into(),
        ));
    }
    if kb.rows.len() != 3 {
        return Err(PackError::BadKeyboard(format!(
            "expected 3 letter rows, found {}",
            kb.rows.len()
        )));
    }
    let expected_rows = ["qwertyuiop", "asdfghjkl", "zxcvbnm"];
    let mut seen = HashSet::new();
    for (row, expected) in kb.rows.iter().zip(expected_rows) {
        let symbols: String = row.iter().map(|k| k.symbol).collect();
        if symbols != expected {
            return Err(PackError::BadKeyboard(format!(
                "row symbols `{symbols}` do not match the standard layout row `{expected}`"
            )));
        }
        for key in row {
            if !seen.insert(key.symbol) {
                return Err(PackError::BadKeyboard(format!(
                    "symbol `{}` has more than one home",
                    key.symbol
                )));
            }
            if !kb.region.contains_box(&key.bbox) {
                return Err(PackError::BadKeyboard(format!(
                    "key `{}` lies outside the keyboard region",
                    key.symbol
                )));
            }
        }
        // Constant pitch within +/- 1 px, strictly increasing centers.
        let centers: Vec<i32> = row
            .iter()
            .map(|k| (k.bbox.x_min + k.bbox.x_max + 1) / 2)
            .collect();
        if centers.len() >= 2 {
            let pitch = centers[1] - centers[0];
            if pitch <= 0 {
                return Err(PackError::BadKeyboard("key centers must increase".into()));
            }
            for w in centers.windows(2) {
                let d = w[1] - w[0];
                if d <= 0 || (d - pitch).abs() > 1 {
                    return Err(PackError::BadKeyboard(format!(
                        "row pitch is not constant: {d} vs {pitch}"
                    )));
                }
            }
        }
    }
    for key in kb.special_keys() {
        if !kb.region.contains_box(&key.bbox) {
            return Err(PackError::BadKeyboard(
                "special key lies outside the keyboard region".into(),
            ));
        }
    }
    Ok(())
}

/// Parse and validate a pack file.
pub fn load_pack(path: impl AsRef<Path>) -> Result<Arc<ScreenPack>, PackError> {
    let raw = fs::read_to_string(path)?;
    parse_pack(&raw)
}

/// Parse and validate pack JSON from memory.
pub fn parse_pack(raw: &str) -> Result<Arc<ScreenPack>, PackError> {
    let pack: ScreenPack = serde_json::from_str(raw).map_err(|e| {
        // serde gives line/column; surface the classified path when we can.
        schema_err(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    pack.validate()?;
    Ok(Arc::new(pack))
}
