//! Raster primitives for the simulated games.

use crate::config::PixelRect;
use crate::frames::Frame;

pub type Rgb = [u8; 3];

pub fn fill_rect(frame: &mut Frame, rect: PixelRect, rgb: Rgb) {
    let right = rect.right.min(frame.width());
    let bottom = rect.bottom.min(frame.height());
    for y in rect.top..bottom {
        for x in rect.left..right {
            frame.put_pixel(x, y, rgb);
        }
    }
}

/// Rectangle border of thickness `t` drawn inside `rect`.
pub fn outline(frame: &mut Frame, rect: PixelRect, t: u32, rgb: Rgb) {
    let PixelRect { left, top, right, bottom } = rect;
    fill_rect(frame, PixelRect::new(left, top, right, top + t), rgb);
    fill_rect(frame, PixelRect::new(left, bottom.saturating_sub(t), right, bottom), rgb);
    fill_rect(frame, PixelRect::new(left, top, left + t, bottom), rgb);
    fill_rect(frame, PixelRect::new(right.saturating_sub(t), top, right, bottom), rgb);
}

pub fn fill_circle(frame: &mut Frame, cx: i64, cy: i64, r: i64, rgb: Rgb) {
    let (w, h) = (i64::from(frame.width()), i64::from(frame.height()));
    for y in (cy - r).max(0)..(cy + r + 1).min(h) {
        for x in (cx - r).max(0)..(cx + r + 1).min(w) {
            let (dx, dy) = (x - cx, y - cy);
            if dx * dx + dy * dy <= r * r {
                frame.put_pixel(x as u32, y as u32, rgb);
            }
        }
    }
}

/// Isosceles triangle pointing up, inscribed in `rect`.
pub fn fill_triangle(frame: &mut Frame, rect: PixelRect, rgb: Rgb) {
    let h = rect.height().max(1);
    let w = rect.width();
    for dy in 0..h {
        let half = (w as u64 * u64::from(dy + 1) / (2 * u64::from(h))) as u32;
        let mid = rect.left + w / 2;
        fill_rect(frame, PixelRect::new(mid - half.min(w / 2), rect.top + dy, mid + half.min(w / 2), rect.top + dy + 1), rgb);
    }
}

/// Vertical gradient from `a` (top) to `b` (bottom).
pub fn gradient(frame: &mut Frame, rect: PixelRect, a: Rgb, b: Rgb) {
    let h = rect.height().max(1);
    for dy in 0..h {
        let t = f64::from(dy) / f64::from(h);
        let c = [0, 1, 2].map(|i| (f64::from(a[i]) * (1.0 - t) + f64::from(b[i]) * t).round() as u8);
        fill_rect(frame, PixelRect::new(rect.left, rect.top + dy, rect.right, rect.top + dy + 1), c);
    }
}

pub fn paste(frame: &mut Frame, src: &Frame, x: u32, y: u32) {
    for sy in 0..src.height() {
        for sx in 0..src.width() {
            if x + sx < frame.width() && y + sy < frame.height() {
                frame.put_pixel(x + sx, y + sy, src.pixel(sx, sy));
            }
        }
    }
}

/// Multiplies every channel inside `rect` by `factor`, saturating.
pub fn scale_brightness(frame: &mut Frame, rect: PixelRect, factor: f64) {
    for y in rect.top..rect.bottom.min(frame.height()) {
        for x in rect.left..rect.right.min(frame.width()) {
            let p = frame.pixel(x, y).map(|c| (f64::from(c) * factor).round().clamp(0.0, 255.0) as u8);
            frame.put_pixel(x, y, p);
        }
    }
}

const GLYPHS: &[(char, [u8; 5])] = &[
    ('0', [0b111, 0b101, 0b101, 0b101, 0b111]),
    ('1', [0b010, 0b110, 0b010, 0b010, 0b111]),
    ('2', [0b111, 0b001, 0b111, 0b100, 0b111]),
    ('3', [0b111, 0b001, 0b111, 0b001, 0b111]),
    ('4', [0b101, 0b101, 0b111, 0b001, 0b001]),
    ('5', [0b111, 0b100, 0b111, 0b001, 0b111]),
    ('6', [0b111, 0b100, 0b111, 0b101, 0b111]),
    ('7', [0b111, 0b001, 0b010, 0b010, 0b010]),
    ('8', [0b111, 0b101, 0b111, 0b101, 0b111]),
    ('9', [0b111, 0b101, 0b111, 0b001, 0b111]),
    ('+', [0b000, 0b010, 0b111, 0b010, 0b000]),
    ('S', [0b111, 0b100, 0b010, 0b001, 0b111]),
    ('R', [0b110, 0b101, 0b110, 0b101, 0b101]),
    ('W', [0b101, 0b101, 0b101, 0b111, 0b101]),
    ('>', [0b100, 0b010, 0b001, 0b010, 0b100]),
    ('?', [0b111, 0b001, 0b011, 0b000, 0b010]),
];

/// Draws a 3x5 glyph with square cells of side `cell`. Unknown characters
/// draw nothing. Returns the advance width.
pub fn glyph(frame: &mut Frame, x: u32, y: u32, ch: char, cell: u32, rgb: Rgb) -> u32 {
    if let Some((_, rows)) = GLYPHS.iter().find(|(c, _)| *c == ch) {
        for (r, bits) in rows.iter().enumerate() {
            for c in 0..3u32 {
                if bits & (0b100 >> c) != 0 {
                    let (px, py) = (x + c * cell, y + r as u32 * cell);
                    fill_rect(frame, PixelRect::new(px, py, px + cell, py + cell), rgb);
                }
            }
        }
    }
    4 * cell
}

pub fn glyphs(frame: &mut Frame, x: u32, y: u32, text: &str, cell: u32, rgb: Rgb) {
    let mut cx = x;
    for ch in text.chars() {
        cx += glyph(frame, cx, y, ch, cell, rgb);
    }
}

/// Pixel width of `text` drawn with [`glyphs`].
pub fn glyphs_width(text: &str, cell: u32) -> u32 {
    (text.chars().count() as u32 * 4).saturating_sub(1) * cell
}
