//! Bundled synthetic content: a deterministic screen pack (with keyboard),
//! the matching task pack with golden trajectories, a calibrated device
//! profile, and small probe packs for property sweeps.
//!
//! The JSON files under `packs/synthetic/` are generated from these
//! builders; a test guards against drift.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::action::{ActionSpec, SwipeDistance};
use crate::arm::calibration::WorkspaceBounds;
use crate::arm::profile::{Correspondence, DeviceProfile};
use crate::bench::task::{Category, Level, Origin, TaskPack, TaskSet, TaskSpec};
use crate::geom::{BBox, Direction, ScreenDims};
use crate::keys;
use crate::perception::center_of;
use crate::sim::pack::{
    Effect, ElementKind, Guard, GuiElement, KeySpec, KeyboardSpec, ScreenPack, ScreenSpec,
    TransitionRule, Trigger,
};

pub const DEVICE_ID: &str = "sim-phone-1";
pub const DIMS: ScreenDims = ScreenDims { width: 360, height: 780 };

fn el(id: &str, kind: ElementKind, label: &str, bbox: BBox) -> GuiElement {
    GuiElement {
        element_id: id.into(),
        kind,
        label: label.into(),
        bbox,
    }
}

fn icon(id: &str, label: &str, bbox: BBox) -> GuiElement {
    el(id, ElementKind::Icon, label, bbox)
}

fn text(id: &str, label: &str, bbox: BBox) -> GuiElement {
    el(id, ElementKind::Text, label, bbox)
}

fn tap(element: &str, target: &str) -> TransitionRule {
    TransitionRule {
        trigger: Trigger::TapOn { element: element.into() },
        guard: None,
        target: target.into(),
        effects: Vec::new(),
    }
}

fn tap_fx(element: &str, target: &str, effects: Vec<(&str, &str)>) -> TransitionRule {
    TransitionRule {
        trigger: Trigger::TapOn { element: element.into() },
        guard: None,
        target: target.into(),
        effects: effects
            .into_iter()
            .map(|(var, value)| Effect { var: var.into(), value: value.into() })
            .collect(),
    }
}

fn gesture(trigger: Trigger, target: &str) -> TransitionRule {
    TransitionRule {
        trigger,
        guard: None,
        target: target.into(),
        effects: Vec::new(),
    }
}

fn swipe_fx(direction: Direction, target: &str, effects: Vec<(&str, &str)>) -> TransitionRule {
    TransitionRule {
        trigger: Trigger::Swipe { direction },
        guard: None,
        target: target.into(),
        effects: effects
            .into_iter()
            .map(|(var, value)| Effect { var: var.into(), value: value.into() })
            .collect(),
    }
}

fn commit_fx(target: &str, effects: Vec<(&str, &str)>) -> TransitionRule {
    TransitionRule {
        trigger: Trigger::TextCommit,
        guard: None,
        target: target.into(),
        effects: effects
            .into_iter()
            .map(|(var, value)| Effect { var: var.into(), value: value.into() })
            .collect(),
    }
}

/// Build a standard-layout keyboard overlay for a screen of the given size.
/// `pitch` must be even so every key center is an exact integer.
pub fn standard_keyboard(dims: ScreenDims) -> KeyboardSpec {
    let w = dims.width as i32;
    let h = dims.height as i32;
    let pitch = (w / 10) & !1; // even
    let x0 = pitch / 2;
    let key_w = pitch - 4;
    let row_dy = ((h as f64 * 0.059) as i32).max(24) & !1;
    let key_h = row_dy - 2 - (row_dy % 2);
    let y4 = h - row_dy / 2 - 4;
    let y1 = y4 - 3 * row_dy;
    let region_top = y1 - row_dy / 2 - 2;

    let key_at = |cx: i32, cy: i32, symbol: char| KeySpec {
        symbol,
        bbox: BBox::new(cx - key_w / 2, cy - key_h / 2, cx + key_w / 2, cy + key_h / 2),
    };

    let mut rows = Vec::with_capacity(3);
    for (r, row_str) in keys::LETTER_ROWS.iter().enumerate() {
        let cy = y1 + r as i32 * row_dy;
        let indent = (keys::ROW_INDENT[r] * pitch as f64) as i32;
        rows.push(
            row_str
                .chars()
                .enumerate()
                .map(|(k, symbol)| key_at(x0 + indent + k as i32 * pitch, cy, symbol))
                .collect::<Vec<_>>(),
        );
    }

    let slot = |s: keys::SpecialKeySlot| -> (i32, i32) {
        (
            x0 + (s.col * pitch as f64) as i32,
            y1 + s.row_offset as i32 * row_dy,
        )
    };
    let special = |s: keys::SpecialKeySlot| {
        let (cx, cy) = slot(s);
        key_at(cx, cy, '\0')
    };

    KeyboardSpec {
        region: BBox::new(0, region_top, w, h),
        rows,
        shift: special(keys::SHIFT_SLOT),
        symbols_toggle: special(keys::SYMBOLS_SLOT),
        space: special(keys::SPACE_SLOT),
        backspace: special(keys::BACKSPACE_SLOT),
        return_key: special(keys::RETURN_SLOT),
    }
}

/// The bundled synthetic screen pack: a phone with notes, mail, browser,
/// music, and settings apps across 18 screens, exercising taps, swipes,
/// variables, both gestures, gesture-disabled fallback screens, and typing.
pub fn bundled_screen_pack() -> Arc<ScreenPack> {
    let kb = standard_keyboard(DIMS);

    let mut screens = Vec::new();

    screens.push(ScreenSpec {
        screen_id: "phone_home".into(),
        elements: vec![
            text("txt_clock", "12:00", BBox::new(130, 20, 230, 60)),
            icon("ic_notes", "Notes", BBox::new(20, 100, 140, 160)),
            icon("ic_mail", "Mail", BBox::new(220, 100, 340, 160)),
            icon("ic_browser", "Browser", BBox::new(20, 200, 140, 260)),
            icon("ic_music", "Music", BBox::new(220, 200, 340, 260)),
            icon("ic_settings", "Settings", BBox::new(20, 300, 140, 360)),
        ],
        transitions: vec![
            tap("ic_notes", "notes_home"),
            tap("ic_mail", "mail_home"),
            tap("ic_browser", "browser_home"),
            tap("ic_music", "music_home"),
            tap("ic_settings", "settings_home"),
        ],
        supports_edge_back_gesture: true,
        supports_bottom_exit_gesture: true,
        keyboard_visible: false,
    });

    screens.push(ScreenSpec {
        screen_id: "notes_home".into(),
        elements: vec![
            text("txt_title", "Notes", BBox::new(20, 20, 120, 60)),
            text("txt_empty", "No notes yet", BBox::new(80, 200, 280, 240)),
            icon("ic_new", "new note", BBox::new(120, 340, 240, 420)),
        ],
        transitions: vec![
            tap("ic_new", "note_edit"),
            gesture(Trigger::BackGesture, "phone_home"),
            gesture(Trigger::ExitGesture, "phone_home"),
        ],
        supports_edge_back_gesture: true,
        supports_bottom_exit_gesture: true,
        keyboard_visible: false,
    });

    screens.push(ScreenSpec {
        screen_id: "note_edit".into(),
        elements: vec![text("txt_field", "Note body", BBox::new(20, 80, 340, 140))],
        transitions: vec![
            commit_fx("note_saved", vec![("note_text", "$text_buffer")]),
            gesture(Trigger::BackGesture, "notes_home"),
            gesture(Trigger::ExitGesture, "phone_home"),
        ],
        supports_edge_back_gesture: true,
        supports_bottom_exit_gesture: true,
        keyboard_visible: true,
    });

    // Gestures disabled; holds a back icon so the grounding fallback works.
    screens.push(ScreenSpec {
        screen_id: "note_saved".into(),
        elements: vec![
            icon("ic_back", "back", BBox::new(20, 20, 80, 70)),
            text("txt_saved", "Saved", BBox::new(130, 200, 230, 240)),
        ],
        transitions: vec![tap("ic_back", "notes_home")],
        supports_edge_back_gesture: false,
        supports_bottom_exit_gesture: false,
        keyboard_visible: false,
    });

    screens.push(ScreenSpec {
        screen_id: "mail_home".into(),
        elements: vec![
            text("txt_inbox", "Inbox", BBox::new(20, 20, 120, 60)),
            text("txt_msg", "Welcome aboard", BBox::new(20, 120, 340, 170)),
            icon("ic_compose", "compose", BBox::new(120, 340, 240, 420)),
        ],
        transitions: vec![
            tap("ic_compose", "mail_compose"),
            gesture(Trigger::BackGesture, "phone_home"),
            gesture(Trigger::ExitGesture, "phone_home"),
        ],
        supports_edge_back_gesture: true,
        supports_bottom_exit_gesture: true,
        keyboard_visible: false,
    });

    screens.push(ScreenSpec {
        screen_id: "mail_compose".into(),
        elements: vec![text("txt_to", "Recipient", BBox::new(20, 80, 340, 130))],
        transitions: vec![
            commit_fx("mail_sent", vec![("mail_body", "$text_buffer")]),
            gesture(Trigger::BackGesture, "mail_home"),
            gesture(Trigger::ExitGesture, "phone_home"),
        ],
        supports_edge_back_gesture: true,
        supports_bottom_exit_gesture: true,
        keyboard_visible: true,
    });

    // Gestures disabled and no back/exit affordance at all: the documented
    // fallback-failure screen.
    screens.push(ScreenSpec {
        screen_id: "mail_sent".into(),
        elements: vec![
            text("txt_done", "Message delivered", BBox::new(100, 200, 260, 250)),
            icon("ic_inbox", "inbox", BBox::new(120, 400, 240, 460)),
        ],
        transitions: vec![tap("ic_inbox", "mail_home")],
        supports_edge_back_gesture: false,
        supports_bottom_exit_gesture: false,
        keyboard_visible: false,
    });

    screens.push(ScreenSpec {
        screen_id: "browser_home".into(),
        elements: vec![
            text("txt_search", "Search the web", BBox::new(40, 80, 320, 130)),
            text("txt_news", "Top sites", BBox::new(40, 200, 320, 250)),
        ],
        transitions: vec![
            tap("txt_search", "browser_search"),
            gesture(Trigger::Swipe { direction: Direction::Up }, "browser_feed"),
            gesture(Trigger::BackGesture, "phone_home"),
            gesture(Trigger::ExitGesture, "phone_home"),
        ],
        supports_edge_back_gesture: true,
        supports_bottom_exit_gesture: true,
        keyboard_visible: false,
    });

    screens.push(ScreenSpec {
        screen_id: "browser_search".into(),
        elements: vec![text("txt_hint", "Enter query", BBox::new(40, 80, 320, 130))],
        transitions: vec![
            commit_fx("browser_results", vec![("query", "$text_buffer")]),
            gesture(Trigger::BackGesture, "browser_home"),
            gesture(Trigger::ExitGesture, "phone_home"),
        ],
        supports_edge_back_gesture: true,
        supports_bottom_exit_gesture: true,
        keyboard_visible: true,
    });

    screens.push(ScreenSpec {
        screen_id: "browser_results".into(),
        elements: vec![
            text("txt_r1", "Result one", BBox::new(40, 100, 320, 150)),
            text("txt_r2", "Result two", BBox::new(40, 180, 320, 230)),
        ],
        transitions: vec![
            tap("txt_r1", "browser_story"),
            gesture(Trigger::BackGesture, "browser_home"),
            gesture(Trigger::ExitGesture, "phone_home"),
        ],
        supports_edge_back_gesture: true,
        supports_bottom_exit_gesture: true,
        keyboard_visible: false,
    });

    screens.push(ScreenSpec {
        screen_id: "browser_feed".into(),
        elements: vec![text("txt_story", "Top story", BBox::new(40, 100, 320, 150))],
        transitions: vec![
            tap("txt_story", "browser_story"),
            gesture(Trigger::Swipe { direction: Direction::Down }, "browser_home"),
            gesture(Trigger::BackGesture, "browser_home"),
            gesture(Trigger::ExitGesture, "phone_home"),
        ],
        supports_edge_back_gesture: true,
        supports_bottom_exit_gesture: true,
        keyboard_visible: false,
    });

    screens.push(ScreenSpec {
        screen_id: "browser_story".into(),
        elements: vec![text("txt_body", "Story body", BBox::new(30, 100, 330, 400))],
        transitions: vec![
            swipe_fx(Direction::Up, "browser_story", vec![("scrolled", "yes")]),
            gesture(Trigger::BackGesture, "browser_home"),
            gesture(Trigger::ExitGesture, "phone_home"),
        ],
        supports_edge_back_gesture: true,
        supports_bottom_exit_gesture: true,
        keyboard_visible: false,
    });

    screens.push(ScreenSpec {
        screen_id: "music_home".into(),
        elements: vec![
            text("txt_title", "Music", BBox::new(20, 20, 120, 60)),
            icon("ic_play", "play", BBox::new(120, 300, 240, 380)),
            icon("ic_library", "library", BBox::new(120, 420, 240, 500)),
        ],
        transitions: vec![
            tap_fx("ic_play", "music_playing", vec![("playing", "yes")]),
            tap("ic_library", "music_library"),
            gesture(Trigger::BackGesture, "phone_home"),
            gesture(Trigger::ExitGesture, "phone_home"),
        ],
        supports_edge_back_gesture: true,
        supports_bottom_exit_gesture: true,
        keyboard_visible: false,
    });

    screens.push(ScreenSpec {
        screen_id: "music_playing".into(),
        elements: vec![
            text("txt_song", "Now playing", BBox::new(80, 150, 280, 200)),
            icon("ic_pause", "pause", BBox::new(120, 300, 240, 380)),
        ],
        transitions: vec![
            tap_fx("ic_pause", "music_home", vec![("playing", "no")]),
            gesture(Trigger::BackGesture, "music_home"),
            gesture(Trigger::ExitGesture, "phone_home"),
        ],
        supports_edge_back_gesture: true,
        supports_bottom_exit_gesture: true,
        keyboard_visible: false,
    });

    screens.push(ScreenSpec {
        screen_id: "music_library".into(),
        elements: vec![
            text("txt_lib", "Library", BBox::new(20, 20, 140, 60)),
            text("txt_song_a", "Song Alpha", BBox::new(40, 120, 320, 170)),
        ],
        transitions: vec![
            gesture(Trigger::BackGesture, "music_home"),
            gesture(Trigger::ExitGesture, "phone_home"),
        ],
        supports_edge_back_gesture: true,
        supports_bottom_exit_gesture: true,
        keyboard_visible: false,
    });

    screens.push(ScreenSpec {
        screen_id: "settings_home".into(),
        elements: vec![
            text("txt_title", "Settings", BBox::new(20, 20, 160, 60)),
            text("txt_display", "Display", BBox::new(40, 120, 320, 170)),
            text("txt_sound", "Sound", BBox::new(40, 200, 320, 250)),
        ],
        transitions: vec![
            tap("txt_display", "settings_display"),
            tap("txt_sound", "settings_sound"),
            gesture(Trigger::BackGesture, "phone_home"),
            gesture(Trigger::ExitGesture, "phone_home"),
        ],
        supports_edge_back_gesture: true,
        supports_bottom_exit_gesture: true,
        keyboard_visible: false,
    });

    let toggle = |element: &str, screen: &str, var: &str| -> Vec<TransitionRule> {
        vec![
            TransitionRule {
                trigger: Trigger::TapOn { element: element.into() },
                guard: Some(Guard { var: var.into(), equals: "off".into() }),
                target: screen.into(),
                effects: vec![Effect { var: var.into(), value: "on".into() }],
            },
            TransitionRule {
                trigger: Trigger::TapOn { element: element.into() },
                guard: Some(Guard { var: var.into(), equals: "on".into() }),
                target: screen.into(),
                effects: vec![Effect { var: var.into(), value: "off".into() }],
            },
        ]
    };

    let mut display_rules = toggle("txt_dark", "settings_display", "dark");
    display_rules.push(gesture(Trigger::BackGesture, "settings_home"));
    display_rules.push(gesture(Trigger::ExitGesture, "phone_home"));
    screens.push(ScreenSpec {
        screen_id: "settings_display".into(),
        elements: vec![text("txt_dark", "Dark theme", BBox::new(40, 120, 320, 170))],
        transitions: display_rules,
        supports_edge_back_gesture: true,
        supports_bottom_exit_gesture: true,
        keyboard_visible: false,
    });

    let mut sound_rules = toggle("txt_mute", "settings_sound", "muted");
    sound_rules.push(gesture(Trigger::BackGesture, "settings_home"));
    sound_rules.push(gesture(Trigger::ExitGesture, "phone_home"));
    screens.push(ScreenSpec {
        screen_id: "settings_sound".into(),
        elements: vec![text("txt_mute", "Mute", BBox::new(40, 120, 320, 170))],
        transitions: sound_rules,
        supports_edge_back_gesture: true,
        supports_bottom_exit_gesture: true,
        keyboard_visible: false,
    });

    let element_count = screens.iter().map(|s| s.elements.len() as u64).sum();

    let mut apps = BTreeMap::new();
    apps.insert("notes".to_string(), "notes_home".to_string());
    apps.insert("mail".to_string(), "mail_home".to_string());
    apps.insert("browser".to_string(), "browser_home".to_string());
    apps.insert("music".to_string(), "music_home".to_string());
    apps.insert("settings".to_string(), "settings_home".to_string());

    let mut variables = BTreeMap::new();
    for (k, v) in [
        ("dark", "off"),
        ("muted", "off"),
        ("playing", "no"),
        ("scrolled", "no"),
        ("note_text", ""),
        ("mail_body", ""),
        ("query", ""),
    ] {
        variables.insert(k.to_string(), v.to_string());
    }

    let pack = ScreenPack {
        pack_version: 1,
        pack_id: "synthetic-v1".into(),
        dims: DIMS,
        home_screen: "phone_home".into(),
        apps,
        variables,
        element_count,
        keyboard: Some(kb),
        screens,
    };
    pack.validate().expect("bundled pack must validate");
    Arc::new(pack)
}

fn center_of_element(pack: &ScreenPack, screen: &str, element: &str) -> (i32, i32) {
    let s = pack.screen(screen).expect("screen exists");
    let e = s
        .elements
        .iter()
        .find(|e| e.element_id == element)
        .expect("element exists");
    center_of(&e.bbox)
}

/// The bundled task pack: 12 tasks with golden trajectories over the
/// bundled screen pack, spanning all three task sets and every challenging
/// action.
pub fn bundled_task_pack() -> TaskPack {
    let pack = bundled_screen_pack();
    let kb = pack.keyboard.as_ref().unwrap();
    let ret = center_of(&kb.return_key.bbox);

    let tap_el = |screen: &str, element: &str| -> ActionSpec {
        let (x, y) = center_of_element(&pack, screen, element);
        ActionSpec::Tap { x, y }
    };
    let tap_return = ActionSpec::Tap { x: ret.0, y: ret.1 };
    let text = |s: &str| ActionSpec::Text { text: s.to_string() };
    let swipe = |x: i32, y: i32, direction: Direction, distance: SwipeDistance| ActionSpec::Swipe {
        x,
        y,
        direction,
        distance,
    };

    let single = |id: &str,
                  category: Category,
                  level: Level,
                  set: TaskSet,
                  app: &str,
                  instruction: &str,
                  golden: Vec<ActionSpec>| TaskSpec {
        task_id: id.into(),
        category,
        level: Some(level),
        apps: vec![app.into()],
        set,
        instruction: instruction.into(),
        golden_steps: golden.len() as u32,
        origin: Origin::AppHome,
        golden_trajectory: Some(golden),
    };

    let cross = |id: &str,
                 category: Category,
                 apps: Vec<&str>,
                 instruction: &str,
                 golden: Vec<ActionSpec>| TaskSpec {
        task_id: id.into(),
        category,
        level: None,
        apps: apps.into_iter().map(String::from).collect(),
        set: TaskSet::CrossApp,
        instruction: instruction.into(),
        golden_steps: golden.len() as u32,
        origin: Origin::PhoneHome,
        golden_trajectory: Some(golden),
    };

    let tasks = vec![
        single(
            "t01_open_display",
            Category::SystemApps,
            Level::Simple,
            TaskSet::Standard,
            "settings",
            "Open the Display settings page.",
            vec![tap_el("settings_home", "txt_display")],
        ),
        single(
            "t02_play_music",
            Category::MediaEntmt,
            Level::Simple,
            TaskSet::Standard,
            "music",
            "Start playing music.",
            vec![tap_el("music_home", "ic_play")],
        ),
        single(
            "t03_dark_theme",
            Category::SystemApps,
            Level::Medium,
            TaskSet::Standard,
            "settings",
            "Open Display settings and turn the dark theme on.",
            vec![
                tap_el("settings_home", "txt_display"),
                tap_el("settings_display", "txt_dark"),
            ],
        ),
        single(
            "t04_play_pause",
            Category::MediaEntmt,
            Level::Medium,
            TaskSet::Standard,
            "music",
            "Start playing music, then pause it.",
            vec![
                tap_el("music_home", "ic_play"),
                tap_el("music_playing", "ic_pause"),
            ],
        ),
        single(
            "t05_feed_story",
            Category::NewsReading,
            Level::Hard,
            TaskSet::Standard,
            "browser",
            "Open the news feed, open the top story, and scroll down in it.",
            vec![
                swipe(180, 400, Direction::Up, SwipeDistance::Medium),
                tap_el("browser_feed", "txt_story"),
                swipe(180, 400, Direction::Up, SwipeDistance::Short),
            ],
        ),
        single(
            "t06_new_note",
            Category::ProdTools,
            Level::Simple,
            TaskSet::Challenging,
            "notes",
            "Create a new note saying 'hi' and save it.",
            vec![tap_el("notes_home", "ic_new"), text("hi"), tap_return.clone()],
        ),
        single(
            "t07_note_back",
            Category::ProdTools,
            Level::Medium,
            TaskSet::Challenging,
            "notes",
            "Create a new note saying 'hi', save it, and navigate back to the notes list.",
            vec![
                tap_el("notes_home", "ic_new"),
                text("hi"),
                tap_return.clone(),
                ActionSpec::Back,
            ],
        ),
        single(
            "t08_compose_back",
            Category::CommSocial,
            Level::Simple,
            TaskSet::Challenging,
            "mail",
            "Open the mail composer, then navigate back to the inbox.",
            vec![tap_el("mail_home", "ic_compose"), ActionSpec::Back],
        ),
        single(
            "t09_search_exit",
            Category::ProdTools,
            Level::Medium,
            TaskSet::Challenging,
            "browser",
            "Search the web for 'cats', then exit the browser.",
            vec![
                tap_el("browser_home", "txt_search"),
                text("cats"),
                tap_return.clone(),
                ActionSpec::Exit,
            ],
        ),
        single(
            "t10_send_greeting",
            Category::CommSocial,
            Level::Hard,
            TaskSet::Challenging,
            "mail",
            "Compose and send a mail saying 'Hello 1'.",
            vec![
                tap_el("mail_home", "ic_compose"),
                text("Hello 1"),
                tap_return.clone(),
            ],
        ),
        cross(
            "t11_note_then_music",
            Category::InformationManagement,
            vec!["notes", "music"],
            "Create a note saying 'plan', save it, go back, leave notes, then start playing music.",
            vec![
                tap_el("phone_home", "ic_notes"),
                tap_el("notes_home", "ic_new"),
                text("plan"),
                tap_return.clone(),
                ActionSpec::Back,
                ActionSpec::Exit,
                tap_el("phone_home", "ic_music"),
                tap_el("music_home", "ic_play"),
            ],
        ),
        cross(
            "t12_search_then_mail",
            Category::MultiApps,
            vec!["browser", "mail"],
            "Search the web for 'news', exit the browser, then send a mail saying 'fyi'.",
            vec![
                tap_el("phone_home", "ic_browser"),
                tap_el("browser_home", "txt_search"),
                text("news"),
                tap_return,
                ActionSpec::Exit,
                tap_el("phone_home", "ic_mail"),
                tap_el("mail_home", "ic_compose"),
                text("fyi"),
                ActionSpec::Tap {
                    x: center_of(&kb.return_key.bbox).0,
                    y: center_of(&kb.return_key.bbox).1,
                },
            ],
        ),
    ];

    let pack = TaskPack {
        task_pack_version: 1,
        screen_pack: Some("screens.json".into()),
        device_profile: Some("device.json".into()),
        tasks,
    };
    pack.validate().expect("bundled task pack must validate");
    pack
}

/// Device profile matching the bundled pack: a 0.2 mm/px workspace with
/// five exactly-affine correspondences.
pub fn bundled_device_profile() -> DeviceProfile {
    let w = DIMS.width as f64;
    let h = DIMS.height as f64;
    let scale = 0.2;
    let corr = |px: f64, py: f64| Correspondence {
        pixel: [px, py],
        workspace: [px * scale, py * scale],
    };
    DeviceProfile {
        profile_version: 1,
        device_id: DEVICE_ID.into(),
        dims: DIMS,
        workspace: WorkspaceBounds {
            x_min: 0.0,
            x_max: w * scale,
            y_min: 0.0,
            y_max: h * scale,
        },
        z_contact: 2.0,
        z_hover: 12.0,
        correspondences: vec![
            corr(0.0, 0.0),
            corr(w, 0.0),
            corr(0.0, h),
            corr(w, h),
            corr(w / 2.0, h / 2.0),
        ],
    }
}

/// Minimal pack for gesture-classification sweeps at arbitrary dims: a hub
/// screen with back/exit rules leading to distinct targets.
pub fn gesture_probe_pack(dims: ScreenDims) -> Arc<ScreenPack> {
    let pack = ScreenPack {
        pack_version: 1,
        pack_id: format!("probe-{}x{}", dims.width, dims.height),
        dims,
        home_screen: "hub".into(),
        apps: BTreeMap::new(),
        variables: BTreeMap::new(),
        element_count: 0,
        keyboard: None,
        screens: vec![
            ScreenSpec {
                screen_id: "hub".into(),
                elements: vec![],
                transitions: vec![
                    gesture(Trigger::BackGesture, "went_back"),
                    gesture(Trigger::ExitGesture, "went_home"),
                ],
                supports_edge_back_gesture: true,
                supports_bottom_exit_gesture: true,
                keyboard_visible: false,
            },
            ScreenSpec {
                screen_id: "went_back".into(),
                elements: vec![],
                transitions: vec![],
                supports_edge_back_gesture: true,
                supports_bottom_exit_gesture: true,
                keyboard_visible: false,
            },
            ScreenSpec {
                screen_id: "went_home".into(),
                elements: vec![],
                transitions: vec![],
                supports_edge_back_gesture: true,
                supports_bottom_exit_gesture: true,
                keyboard_visible: false,
            },
        ],
    };
    pack.validate().expect("probe pack must validate");
    Arc::new(pack)
}

/// Single-screen pack with a visible standard keyboard, for localization
/// probes at arbitrary screen sizes (pitch = width/10, forced even).
pub fn keyboard_probe_pack(dims: ScreenDims) -> Arc<ScreenPack> {
    let pack = ScreenPack {
        pack_version: 1,
        pack_id: format!("kb-probe-{}x{}", dims.width, dims.height),
        dims,
        home_screen: "editor".into(),
        apps: BTreeMap::new(),
        variables: BTreeMap::new(),
        element_count: 0,
        keyboard: Some(standard_keyboard(dims)),
        screens: vec![ScreenSpec {
            screen_id: "editor".into(),
            elements: vec![],
            transitions: vec![],
            supports_edge_back_gesture: true,
            supports_bottom_exit_gesture: true,
            keyboard_visible: true,
        }],
    };
    pack.validate().expect("keyboard probe pack must validate");
    Arc::new(pack)
}

/// Identity-scale profile for an arbitrary screen, used by probe tests.
pub fn identity_profile(dims: ScreenDims, device_id: &str) -> DeviceProfile {
    let w = dims.width as f64;
    let h = dims.height as f64;
    DeviceProfile {
        profile_version: 1,
        device_id: device_id.into(),
        dims,
        workspace: WorkspaceBounds {
            x_min: 0.0,
            x_max: w,
            y_min: 0.0,
            y_max: h,
        },
        z_contact: 1.0,
        z_hover: 10.0,
        correspondences: vec![
            Correspondence { pixel: [0.0, 0.0], workspace: [0.0, 0.0] },
            Correspondence { pixel: [w, 0.0], workspace: [w, 0.0] },
            Correspondence { pixel: [0.0, h], workspace: [0.0, h] },
        ],
    }
}

/// Serialize the bundled pack, task pack, and device profile into `dir` as
/// `screens.json`, `tasks.json`, and `device.json`.
pub fn write_bundled_files(dir: &std::path::Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(
        dir.join("screens.json"),
        serde_json::to_string_pretty(&*bundled_screen_pack()).expect("pack serializes") + "\n",
    )?;
    std::fs::write(
        dir.join("tasks.json"),
        serde_json::to_string_pretty(&bundled_task_pack()).expect("tasks serialize") + "\n",
    )?;
    std::fs::write(
        dir.join("device.json"),
        serde_json::to_string_pretty(&bundled_device_profile()).expect("profile serializes") + "\n",
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_pack_shape() {
        let pack = bundled_screen_pack();
        assert!(pack.screens.len() >= 10, "need >= 10 screens");
        assert!(pack.keyboard.is_some());
        assert_eq!(pack.home_screen, "phone_home");
    }

    #[test]
    fn bundled_tasks_cover_the_sets_and_challenging_actions() {
        let tasks = bundled_task_pack();
        let counts = tasks.counts();
        assert!(counts.total >= 10);
        assert!(counts.standard >= 3);
        assert!(counts.challenging >= 3);
        assert!(counts.cross_app >= 2);
        let challenging_action = |t: &TaskSpec| {
            t.golden_trajectory.as_ref().unwrap().iter().any(|a| {
                matches!(
                    a,
                    ActionSpec::Back | ActionSpec::Exit | ActionSpec::Text { .. }
                )
            })
        };
        let n = tasks.tasks.iter().filter(|t| challenging_action(t)).count();
        assert!(n >= 3, "need >= 3 tasks with back/exit/text, got {n}");
    }

    #[test]
    fn keyboard_key_centers_are_exact_integers_on_the_grid() {
        let kb = standard_keyboard(DIMS);
        let pitch = center_of(&kb.rows[0][1].bbox).0 - center_of(&kb.rows[0][0].bbox).0;
        assert!(pitch > 0 && pitch % 2 == 0);
        for row in &kb.rows {
            let centers: Vec<i32> = row.iter().map(|k| center_of(&k.bbox).0).collect();
            for w in centers.windows(2) {
                assert_eq!(w[1] - w[0], pitch);
            }
        }
    }

    #[test]
    fn bundled_profile_is_exactly_affine() {
        let profile = bundled_device_profile();
        let map = profile.calibrate().unwrap();
        assert!(map.residual <= 1e-9);
    }
}
