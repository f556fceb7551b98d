//! Deterministic flat-color rendering of simulator screens.
//!
//! The raster is content-addressed and only has to change exactly when the
//! logical screen state changes: element set, keyboard layer/shift, typed
//! buffer, or variable values. Pixel fidelity is not load-bearing (sim-mode
//! perception reads the scene graph), so elements render as hashed-color
//! rectangles with a 1 px border.

use std::collections::BTreeMap;

use crate::blob::{stable_hash64, RasterImage};
use crate::geom::BBox;
use crate::sim::keyboard::KeyboardState;
use crate::sim::pack::{KeyboardSpec, ScreenPack, ScreenSpec};

fn color_from(tag: &str, data: &str) -> [u8; 3] {
    let h = stable_hash64(&format!("{tag}\u{1f}{data}"));
    // Keep channels away from pure black/white so borders stay visible.
    [
        40 + ((h >> 0) % 176) as u8,
        40 + ((h >> 24) % 176) as u8,
        40 + ((h >> 48) % 176) as u8,
    ]
}

fn darker(c: [u8; 3]) -> [u8; 3] {
    [c[0] / 2, c[1] / 2, c[2] / 2]
}

fn draw_box(img: &mut RasterImage, b: &BBox, fill: [u8; 3]) {
    img.fill_rect(b.x_min, b.y_min, b.x_max, b.y_max, fill);
    let border = darker(fill);
    img.fill_rect(b.x_min, b.y_min, b.x_max, b.y_min + 1, border);
    img.fill_rect(b.x_min, b.y_max - 1, b.x_max, b.y_max, border);
    img.fill_rect(b.x_min, b.y_min, b.x_min + 1, b.y_max, border);
    img.fill_rect(b.x_max - 1, b.y_min, b.x_max, b.y_max, border);
}

fn draw_keyboard(img: &mut RasterImage, kb: &KeyboardSpec, state: &KeyboardState) {
    draw_box(img, &kb.region, color_from("kb", "panel"));
    for (row_ix, row) in kb.rows.iter().enumerate() {
        for (col_ix, key) in row.iter().enumerate() {
            let shown = state.shown_symbol(row_ix, col_ix, key.symbol);
            draw_box(img, &key.bbox, color_from("key", &shown.to_string()));
        }
    }
    let shift_tag = if state.shift { "shift-on" } else { "shift-off" };
    draw_box(img, &kb.shift.bbox, color_from("key", shift_tag));
    let toggle_tag = if state.symbols_layer { "abc" } else { "?123" };
    draw_box(img, &kb.symbols_toggle.bbox, color_from("key", toggle_tag));
    draw_box(img, &kb.space.bbox, color_from("key", "space"));
    draw_box(img, &kb.backspace.bbox, color_from("key", "backspace"));
    draw_box(img, &kb.return_key.bbox, color_from("key", "return"));
}

/// Render a full screen state. Pure: identical inputs give identical bytes.
pub fn render_screen(
    pack: &ScreenPack,
    screen: &ScreenSpec,
    variables: &BTreeMap<String, String>,
    keyboard_state: &KeyboardState,
    text_buffer: &str,
) -> RasterImage {
    let dims = pack.dims;
    let mut img = RasterImage::filled(
        dims.width,
        dims.height,
        color_from("screen", &screen.screen_id),
    );

    for el in &screen.elements {
        let fill = color_from("element", &format!("{}|{}|{}", el.kind, el.element_id, el.label));
        draw_box(&mut img, &el.bbox, fill);
    }

    if screen.keyboard_visible {
        if let Some(kb) = &pack.keyboard {
            draw_keyboard(&mut img, kb, keyboard_state);
            // Buffer strip just above the keyboard region: the typed text is
            // part of the visible state.
            let strip = BBox::new(
                0,
                (kb.region.y_min - 8).max(0),
                dims.width as i32,
                kb.region.y_min.max(1),
            );
            if strip.is_valid() {
                draw_box(&mut img, &strip, color_from("buffer", text_buffer));
            }
        }
    }

    // Variable fingerprint strip along the bottom edge: transitions that only
    // assign variables still change the screen.
    let vars_key: String = variables
        .iter()
        .map(|(k, v)| format!("{k}={v};"))
        .collect();
    let h = dims.height as i32;
    img.fill_rect(0, h - 3, dims.width as i32, h, color_from("vars", &vars_key));

    img
}
