//! Burn detection overlays (rectangle outlines + text labels) into images.

use algaeval_core::imgio::Image;
use algaeval_core::runtime::ScoredBox;

use crate::font;

/// Overlay appearance. The label text itself is always `<class> <score>`
/// with the score to two decimals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OverlaySpec {
    pub color: [u8; 3],
    /// Outline thickness in pixels, at least 1, drawn inward from the box edge.
    pub stroke: u32,
}

impl Default for OverlaySpec {
    fn default() -> Self {
        Self {
            color: [0, 255, 0],
            stroke: 2,
        }
    }
}

fn put(image: &mut Image, x: i64, y: i64, color: [u8; 3]) {
    if x >= 0 && y >= 0 && (x as u32) < image.width() && (y as u32) < image.height() {
        image.set_rgb(x as u32, y as u32, color);
    }
}

/// Outline the pixel rectangle [x0, x1) x [y0, y1), `stroke` pixels thick,
/// growing inward so a full-image box leaves a ring at the image edges.
fn draw_rect(image: &mut Image, x0: i64, y0: i64, x1: i64, y1: i64, spec: &OverlaySpec) {
    if x1 <= x0 || y1 <= y0 {
        return;
    }
    for inset in 0..spec.stroke as i64 {
        let (left, top) = (x0 + inset, y0 + inset);
        let (right, bottom) = (x1 - 1 - inset, y1 - 1 - inset);
        if right < left || bottom < top {
            break;
        }
        for x in left..=right {
            put(image, x, top, spec.color);
            put(image, x, bottom, spec.color);
        }
        for y in top..=bottom {
            put(image, left, y, spec.color);
            put(image, right, y, spec.color);
        }
    }
}

fn draw_text(image: &mut Image, x: i64, y: i64, text: &str, color: [u8; 3]) {
    let mut cursor = x;
    for c in text.chars() {
        let columns = font::glyph(c);
        for (cx, col) in columns.iter().enumerate() {
            for cy in 0..font::GLYPH_HEIGHT {
                if col >> cy & 1 == 1 {
                    put(image, cursor + cx as i64, y + cy as i64, color);
                }
            }
        }
        cursor += font::GLYPH_ADVANCE as i64;
    }
}

/// Draw one labelled detection. The label sits just above the box when there
/// is room, otherwise just inside its top-left corner.
pub fn draw_detection(image: &mut Image, boxed: &ScoredBox, label: &str, spec: &OverlaySpec) {
    let x0 = boxed.bbox.x_min().round() as i64;
    let y0 = boxed.bbox.y_min().round() as i64;
    let x1 = boxed.bbox.x_max().round() as i64;
    let y1 = boxed.bbox.y_max().round() as i64;
    draw_rect(image, x0, y0, x1, y1, spec);

    let text = format!("{label} {:.2}", boxed.score);
    let text_height = font::GLYPH_HEIGHT as i64 + 1;
    let text_y = if y0 - text_height >= 0 {
        y0 - text_height
    } else {
        y0 + spec.stroke as i64 + 1
    };
    draw_text(image, x0, text_y, &text, spec.color);
}
