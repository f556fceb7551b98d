//! Simulator-side keyboard overlay: layer state, key hit-testing, and the
//! text buffer edits a key press produces.

use serde::{Deserialize, Serialize};

use crate::geom::PxPoint;
use crate::keys;
use crate::sim::pack::KeyboardSpec;

/// Current overlay state. Shift is momentary: it applies to the next letter
/// press only.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyboardState {
    pub symbols_layer: bool,
    pub shift: bool,
}

impl KeyboardState {
    /// Symbol currently shown on the letter-grid key at (row, col).
    pub fn shown_symbol(&self, row: usize, col: usize, letter: char) -> char {
        if self.symbols_layer {
            keys::symbol_at(row, col).unwrap_or(letter)
        } else if self.shift {
            letter.to_ascii_uppercase()
        } else {
            letter
        }
    }
}

/// What a tap inside the keyboard region resolved to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyPress {
    /// A character key on the current layer (already case/layer resolved).
    Char(char),
    Shift,
    SymbolsToggle,
    Space,
    Backspace,
    Return,
    /// Tap landed in the region but on no key.
    None,
}

/// Hit-test a tap point against the keyboard.
pub fn hit_key(kb: &KeyboardSpec, state: KeyboardState, p: PxPoint) -> KeyPress {
    for (row_ix, row) in kb.rows.iter().enumerate() {
        for (col_ix, key) in row.iter().enumerate() {
            if key.bbox.contains(p) {
                return KeyPress::Char(state.shown_symbol(row_ix, col_ix, key.symbol));
            }
        }
    }
    if kb.shift.bbox.contains(p) {
        return KeyPress::Shift;
    }
    if kb.symbols_toggle.bbox.contains(p) {
        return KeyPress::SymbolsToggle;
    }
    if kb.space.bbox.contains(p) {
        return KeyPress::Space;
    }
    if kb.backspace.bbox.contains(p) {
        return KeyPress::Backspace;
    }
    if kb.return_key.bbox.contains(p) {
        return KeyPress::Return;
    }
    KeyPress::None
}

/// Apply a key press to (buffer, state). Returns true when the press should
/// fire the screen's `text_commit` transition (the return key).
pub fn apply_key(press: KeyPress, buffer: &mut String, state: &mut KeyboardState) -> bool {
    match press {
        KeyPress::Char(c) => {
            buffer.push(c);
            state.shift = false;
            false
        }
        KeyPress::Shift => {
            state.shift = !state.shift;
            false
        }
        KeyPress::SymbolsToggle => {
            state.symbols_layer = !state.symbols_layer;
            state.shift = false;
            false
        }
        KeyPress::Space => {
            buffer.push(' ');
            state.shift = false;
            false
        }
        KeyPress::Backspace => {
            buffer.pop();
            false
        }
        KeyPress::Return => true,
        KeyPress::None => false,
    }
}
