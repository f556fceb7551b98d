//! Keyboard localization and typing.
//!
//! Localization grounds the keyboard region, then per row grounds only the
//! first two keys and extrapolates the rest from their pitch (constant
//! vertical coordinate, incrementally adjusted horizontal coordinate).
//! Anchoring each row separately tolerates the per-row indents of the
//! standard layout. Special keys derive geometrically from the letter grid
//! (see [`crate::keys`]). The result is cached per device so the procedure
//! runs once per device, not once per episode.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::action::ActionError;
use crate::geom::{round_half_up, BBox};
use crate::keys;
use crate::perception::{center_of, Grounder};
use crate::sim::env::ScreenObservation;

pub const LAYOUT_CACHE_VERSION: u32 = 1;

/// One located key: its letters-layer symbol and estimated center.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyCenter {
    pub symbol: char,
    pub center: (i32, i32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutRow {
    pub row_y: i32,
    pub keys: Vec<KeyCenter>,
}

/// Estimated per-device keyboard geometry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyboardLayout {
    pub device_id: String,
    pub rows: Vec<LayoutRow>,
    /// shift / symbols / return / space / backspace -> center.
    pub layer_switch_keys: BTreeMap<String, (i32, i32)>,
    pub crop_region: BBox,
}

impl KeyboardLayout {
    pub fn letter_center(&self, c: char) -> Option<(i32, i32)> {
        let (row, col) = keys::letter_home(c)?;
        self.rows.get(row)?.keys.get(col).map(|k| k.center)
    }

    /// Center of a symbols-layer character: it shares the position of the
    /// letter key at the same grid slot.
    pub fn symbol_center(&self, c: char) -> Option<(i32, i32)> {
        let (row, col) = keys::symbol_home(c)?;
        self.rows.get(row)?.keys.get(col).map(|k| k.center)
    }

    pub fn special(&self, name: &str) -> Option<(i32, i32)> {
        self.layer_switch_keys.get(name).copied()
    }
}

/// Ground `query` and keep only hits fully inside the crop region; exactly
/// one must remain for an anchor to be usable.
fn ground_in_region(
    grounder: &dyn Grounder,
    obs: &ScreenObservation,
    region: &BBox,
    query: &str,
) -> Result<BBox, ActionError> {
    let hits = grounder.ground_text(obs, query)?;
    let inside: Vec<BBox> = hits
        .into_iter()
        .filter(|b| region.contains_box(b))
        .collect();
    if inside.len() == 1 {
        Ok(inside[0])
    } else {
        Err(ActionError::AnchorNotFound(query.to_string()))
    }
}

/// Locate the keyboard and estimate every key center from two anchors per
/// row.
pub fn localize_keyboard(
    obs: &ScreenObservation,
    grounder: &dyn Grounder,
    device_id: &str,
) -> Result<KeyboardLayout, ActionError> {
    // Region first: icon grounding finds the keyboard panel.
    let icons = grounder.detect_icons(obs)?;
    let region = icons
        .iter()
        .find(|i| {
            i.label
                .as_deref()
                .map(|l| l.to_lowercase().contains("keyboard"))
                .unwrap_or(false)
        })
        .map(|i| i.bbox)
        .ok_or(ActionError::KeyboardRegionNotFound)?;

    // Per-row anchors: the first two keys of each letter row.
    let mut rows = Vec::with_capacity(3);
    let mut row_pitches = Vec::with_capacity(3);
    for row_str in keys::LETTER_ROWS {
        let mut syms = row_str.chars();
        let first = syms.next().unwrap();
        let second = syms.next().unwrap();
        let b1 = ground_in_region(grounder, obs, &region, &first.to_string())?;
        let b2 = ground_in_region(grounder, obs, &region, &second.to_string())?;
        let c1 = center_of(&b1);
        let c2 = center_of(&b2);
        let pitch = c2.0 - c1.0;
        if pitch <= 0 {
            return Err(ActionError::NonPositivePitch(pitch));
        }
        let row_y = c1.1;
        let keys_in_row: Vec<KeyCenter> = row_str
            .chars()
            .enumerate()
            .map(|(k, symbol)| KeyCenter {
                symbol,
                center: (c1.0 + k as i32 * pitch, row_y),
            })
            .collect();
        rows.push(LayoutRow {
            row_y,
            keys: keys_in_row,
        });
        row_pitches.push(pitch);
    }

    // Special keys from the grid convention: positions are expressed in
    // q-row columns, rows spaced like the letter rows.
    let q0 = rows[0].keys[0].center;
    let pitch = row_pitches[0] as f64;
    let dy = rows[1].row_y - rows[0].row_y;
    if dy <= 0 {
        return Err(ActionError::NonPositiveRowSpacing(dy));
    }
    let slot_center = |slot: keys::SpecialKeySlot| -> (i32, i32) {
        (
            round_half_up(q0.0 as f64 + slot.col * pitch),
            q0.1 + slot.row_offset as i32 * dy,
        )
    };
    let mut layer_switch_keys = BTreeMap::new();
    layer_switch_keys.insert("shift".to_string(), slot_center(keys::SHIFT_SLOT));
    layer_switch_keys.insert("symbols".to_string(), slot_center(keys::SYMBOLS_SLOT));
    layer_switch_keys.insert("space".to_string(), slot_center(keys::SPACE_SLOT));
    layer_switch_keys.insert("backspace".to_string(), slot_center(keys::BACKSPACE_SLOT));
    layer_switch_keys.insert("return".to_string(), slot_center(keys::RETURN_SLOT));

    Ok(KeyboardLayout {
        device_id: device_id.to_string(),
        rows,
        layer_switch_keys,
        crop_region: region,
    })
}

/// One planned keystroke: why we tap, and where.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TapTarget {
    /// A character key on the layer active at that moment.
    Key(char),
    Shift,
    /// The layer toggle (symbols <-> letters).
    LayerToggle,
    Space,
    Backspace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyTap {
    pub target: TapTarget,
    pub at: (i32, i32),
}

/// Plan the tap sequence that types `text`, ordered left-to-right over the
/// string. Layer rules: lowercase taps the key; uppercase taps shift first;
/// digits and symbols switch to the symbols layer and back. If the string
/// ends on the symbols layer a final toggle restores letters so consecutive
/// text actions compose.
pub fn plan_text_input(text: &str, layout: &KeyboardLayout) -> Result<Vec<KeyTap>, ActionError> {
    let mut taps = Vec::new();
    let mut on_symbols = false;

    let shift_at = layout
        .special("shift")
        .ok_or_else(|| ActionError::AnchorNotFound("shift".into()))?;
    let toggle_at = layout
        .special("symbols")
        .ok_or_else(|| ActionError::AnchorNotFound("symbols".into()))?;
    let space_at = layout
        .special("space")
        .ok_or_else(|| ActionError::AnchorNotFound("space".into()))?;
    let backspace_at = layout
        .special("backspace")
        .ok_or_else(|| ActionError::AnchorNotFound("backspace".into()))?;

    for (index, ch) in text.chars().enumerate() {
        match ch {
            ' ' => {
                // Space exists on both layers.
                taps.push(KeyTap { target: TapTarget::Space, at: space_at });
            }
            '\u{8}' => {
                taps.push(KeyTap { target: TapTarget::Backspace, at: backspace_at });
            }
            c if c.is_ascii_lowercase() => {
                if on_symbols {
                    taps.push(KeyTap { target: TapTarget::LayerToggle, at: toggle_at });
                    on_symbols = false;
                }
                let at = layout
                    .letter_center(c)
                    .ok_or(ActionError::UnreachableCharacter { ch: c, index })?;
                taps.push(KeyTap { target: TapTarget::Key(c), at });
            }
            c if c.is_ascii_uppercase() => {
                if on_symbols {
                    taps.push(KeyTap { target: TapTarget::LayerToggle, at: toggle_at });
                    on_symbols = false;
                }
                let at = layout
                    .letter_center(c.to_ascii_lowercase())
                    .ok_or(ActionError::UnreachableCharacter { ch: c, index })?;
                taps.push(KeyTap { target: TapTarget::Shift, at: shift_at });
                taps.push(KeyTap { target: TapTarget::Key(c), at });
            }
            c => {
                let at = layout
                    .symbol_center(c)
                    .ok_or(ActionError::UnreachableCharacter { ch: c, index })?;
                if !on_symbols {
                    taps.push(KeyTap { target: TapTarget::LayerToggle, at: toggle_at });
                    on_symbols = true;
                }
                taps.push(KeyTap { target: TapTarget::Key(c), at });
            }
        }
    }
    if on_symbols {
        taps.push(KeyTap { target: TapTarget::LayerToggle, at: toggle_at });
    }
    Ok(taps)
}

/// Per-device layout cache, optionally file-backed so localization runs only
/// once per device across processes.
#[derive(Debug, Default)]
pub struct LayoutCache {
    layouts: BTreeMap<String, KeyboardLayout>,
    path: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    layout_cache_version: u32,
    layouts: BTreeMap<String, KeyboardLayout>,
}

impl LayoutCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Open a file-backed cache, loading existing entries when present.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, ActionError> {
        let path = path.as_ref().to_path_buf();
        let layouts = if path.exists() {
            let raw = fs::read_to_string(&path)?;
            let file: CacheFile =
                serde_json::from_str(&raw).map_err(|e| ActionError::CacheFormat(e.to_string()))?;
            if file.layout_cache_version != LAYOUT_CACHE_VERSION {
                return Err(ActionError::CacheFormat(format!(
                    "unsupported layout_cache_version {}",
                    file.layout_cache_version
                )));
            }
            file.layouts
        } else {
            BTreeMap::new()
        };
        Ok(Self {
            layouts,
            path: Some(path),
        })
    }

    pub fn get(&self, device_id: &str) -> Option<&KeyboardLayout> {
        self.layouts.get(device_id)
    }

    pub fn insert(&mut self, layout: KeyboardLayout) -> Result<(), ActionError> {
        self.layouts.insert(layout.device_id.clone(), layout);
        if let Some(path) = &self.path {
            let file = CacheFile {
                layout_cache_version: LAYOUT_CACHE_VERSION,
                layouts: self.layouts.clone(),
            };
            fs::write(path, serde_json::to_string_pretty(&file).expect("serializes"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_layout(x0: i32, pitch: i32, y0: i32, dy: i32) -> KeyboardLayout {
        let mut rows = Vec::new();
        for (r, row_str) in keys::LETTER_ROWS.iter().enumerate() {
            let row_y = y0 + r as i32 * dy;
            let indent = (keys::ROW_INDENT[r] * pitch as f64) as i32;
            rows.push(LayoutRow {
                row_y,
                keys: row_str
                    .chars()
                    .enumerate()
                    .map(|(k, symbol)| KeyCenter {
                        symbol,
                        center: (x0 + indent + k as i32 * pitch, row_y),
                    })
                    .collect(),
            });
        }
        let mut specials = BTreeMap::new();
        specials.insert("shift".into(), (x0, y0 + 2 * dy));
        specials.insert("backspace".into(), (x0 + 9 * pitch, y0 + 2 * dy));
        specials.insert("symbols".into(), (x0, y0 + 3 * dy));
        specials.insert("space".into(), (x0 + (4.5 * pitch as f64) as i32, y0 + 3 * dy));
        specials.insert("return".into(), (x0 + 9 * pitch, y0 + 3 * dy));
        KeyboardLayout {
            device_id: "test".into(),
            rows,
            layer_switch_keys: specials,
            crop_region: BBox::new(0, y0 - dy, 10 * pitch + x0 * 2, y0 + 4 * dy),
        }
    }

    #[test]
    fn pitch_extrapolation_matches_the_worked_example() {
        // anchors Q=(54,1480), W=(162,1480) -> pitch 108; 5th key T at (486,1480)
        let layout = grid_layout(54, 108, 1480, 110);
        assert_eq!(layout.letter_center('q'), Some((54, 1480)));
        assert_eq!(layout.letter_center('w'), Some((162, 1480)));
        assert_eq!(layout.letter_center('t'), Some((486, 1480)));
    }

    #[test]
    fn single_lowercase_is_one_tap() {
        let layout = grid_layout(20, 40, 500, 50);
        let taps = plan_text_input("a", &layout).unwrap();
        assert_eq!(taps.len(), 1);
        assert_eq!(taps[0].at, layout.letter_center('a').unwrap());
    }

    #[test]
    fn uppercase_taps_shift_first() {
        let layout = grid_layout(20, 40, 500, 50);
        let taps = plan_text_input("Hi", &layout).unwrap();
        let targets: Vec<&TapTarget> = taps.iter().map(|t| &t.target).collect();
        assert_eq!(
            targets,
            vec![
                &TapTarget::Shift,
                &TapTarget::Key('H'),
                &TapTarget::Key('i')
            ]
        );
    }

    #[test]
    fn digit_switches_layers_and_back() {
        let layout = grid_layout(20, 40, 500, 50);
        let taps = plan_text_input("a1b", &layout).unwrap();
        // a, toggle, 1, toggle, b
        assert_eq!(taps.len(), 5);
        assert_eq!(taps[1].target, TapTarget::LayerToggle);
        assert_eq!(taps[2].target, TapTarget::Key('1'));
        assert_eq!(taps[3].target, TapTarget::LayerToggle);
        // digit 1 sits on the q key position
        assert_eq!(taps[2].at, layout.letter_center('q').unwrap());
    }

    #[test]
    fn trailing_symbol_restores_letters_layer() {
        let layout = grid_layout(20, 40, 500, 50);
        let taps = plan_text_input("a1", &layout).unwrap();
        assert_eq!(taps.last().unwrap().target, TapTarget::LayerToggle);
        assert_eq!(taps.len(), 4);
    }

    #[test]
    fn unreachable_character_reports_index() {
        let layout = grid_layout(20, 40, 500, 50);
        let err = plan_text_input("ab\u{263a}", &layout).unwrap_err();
        match err {
            ActionError::UnreachableCharacter { index, .. } => assert_eq!(index, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn cache_round_trips_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("layouts.json");
        let layout = grid_layout(20, 40, 500, 50);
        {
            let mut cache = LayoutCache::open(&path).unwrap();
            assert!(cache.get("test").is_none());
            cache.insert(layout.clone()).unwrap();
        }
        let cache = LayoutCache::open(&path).unwrap();
        assert_eq!(cache.get("test"), Some(&layout));
    }
}
