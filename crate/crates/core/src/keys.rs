//! The standard international keyboard convention shared by the simulator's
//! overlay and the typing planner: row contents, the symbols layer mapping,
//! and the geometric placement of special keys relative to the letter grid.
//!
//! Letter rows follow QWERTY. The symbols layer reuses the letter-key
//! positions: digits over the q-row, common punctuation over the a- and
//! z-rows. Special keys sit at fixed grid positions: shift and backspace
//! flank the z-row at the first and last q-row columns; the bottom row holds
//! the layer toggle, space (centered), and return.

pub const LETTER_ROWS: [&str; 3] = ["qwertyuiop", "asdfghjkl", "zxcvbnm"];
pub const SYMBOL_ROWS: [&str; 3] = ["1234567890", "@#$_&-+()", "*\"':;!?"];

/// Locate a lowercase letter on the letters layer: (row, column).
pub fn letter_home(c: char) -> Option<(usize, usize)> {
    for (r, row) in LETTER_ROWS.iter().enumerate() {
        if let Some(k) = row.find(c) {
            return Some((r, k));
        }
    }
    None
}

/// Locate a symbols-layer character: (row, column) in letter-grid positions.
pub fn symbol_home(c: char) -> Option<(usize, usize)> {
    for (r, row) in SYMBOL_ROWS.iter().enumerate() {
        if let Some(k) = row.find(c) {
            return Some((r, k));
        }
    }
    None
}

/// The symbols-layer character shown at a letter-grid position.
pub fn symbol_at(row: usize, col: usize) -> Option<char> {
    SYMBOL_ROWS.get(row)?.chars().nth(col)
}

/// Placement of special keys expressed in letter-grid units. `col` is a
/// q-row column index (may be fractional, e.g. space at 4.5); `row_offset`
/// counts rows below the q-row (3 = the bottom row).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialKeySlot {
    pub col: f64,
    pub row_offset: u32,
}

pub const SHIFT_SLOT: SpecialKeySlot = SpecialKeySlot { col: 0.0, row_offset: 2 };
pub const BACKSPACE_SLOT: SpecialKeySlot = SpecialKeySlot { col: 9.0, row_offset: 2 };
pub const SYMBOLS_SLOT: SpecialKeySlot = SpecialKeySlot { col: 0.0, row_offset: 3 };
pub const SPACE_SLOT: SpecialKeySlot = SpecialKeySlot { col: 4.5, row_offset: 3 };
pub const RETURN_SLOT: SpecialKeySlot = SpecialKeySlot { col: 9.0, row_offset: 3 };

/// Per-row horizontal offset of the first key, in pitch units: the a-row is
/// indented half a key, the z-row one and a half.
pub const ROW_INDENT: [f64; 3] = [0.0, 0.5, 1.5];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_letter_has_one_home() {
        for c in 'a'..='z' {
            assert!(letter_home(c).is_some(), "{c} missing");
        }
        assert_eq!(letter_home('q'), Some((0, 0)));
        assert_eq!(letter_home('m'), Some((2, 6)));
    }

    #[test]
    fn digits_sit_over_the_q_row() {
        assert_eq!(symbol_home('1'), Some((0, 0)));
        assert_eq!(symbol_home('0'), Some((0, 9)));
        assert_eq!(symbol_at(0, 4), Some('5'));
    }
}
