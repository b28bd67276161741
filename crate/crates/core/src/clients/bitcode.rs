//! Machine-readable text strips used by the simulated games.
//!
//! A strip is a magenta guard column, one column of eight cells per byte
//! (most significant bit at the top, white for 1, black for 0) and a closing
//! guard column. The offline OCR mock reads these strips back, which stands in
//! for a real OCR engine on synthetic frames.

use crate::config::PixelRect;
use crate::frames::Frame;

pub const GUARD: [u8; 3] = [255, 0, 255];
const ONE: [u8; 3] = [255, 255, 255];
const ZERO: [u8; 3] = [0, 0, 0];

/// Pixel footprint of a strip for `text` with square cells of side `cell`.
pub fn strip_size(text: &str, cell: u32) -> (u32, u32) {
    ((text.len() as u32 + 2) * cell, 8 * cell)
}

/// Draws `text` at `(x, y)`; returns the covered rect (clipped to the frame).
pub fn draw_text(frame: &mut Frame, x: u32, y: u32, text: &str, cell: u32) -> PixelRect {
    let cell = cell.max(1);
    let bytes = text.as_bytes();
    let columns = bytes.len() + 2;
    for col in 0..columns {
        for row in 0..8u32 {
            let colour = if col == 0 || col == columns - 1 {
                GUARD
            } else if bytes[col - 1] & (0x80 >> row) != 0 {
                ONE
            } else {
                ZERO
            };
            for dy in 0..cell {
                for dx in 0..cell {
                    let (px, py) = (x + col as u32 * cell + dx, y + row * cell + dy);
                    if px < frame.width() && py < frame.height() {
                        frame.put_pixel(px, py, colour);
                    }
                }
            }
        }
    }
    let (w, h) = strip_size(text, cell);
    PixelRect::new(x, y, (x + w).min(frame.width()), (y + h).min(frame.height()))
}

fn is_guard(p: [u8; 3]) -> bool {
    p[0] > 180 && p[1] < 80 && p[2] > 180
}

fn is_one(p: [u8; 3]) -> bool {
    0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64 >= 128.0
}

/// Every complete strip in `frame`, in raster order of their top-left corner.
pub fn read_texts(frame: &Frame) -> Vec<(String, PixelRect)> {
    let (w, h) = frame.dimensions();
    let mut found = Vec::new();
    let mut y = 0;
    while y < h {
        let mut x = 0;
        while x < w {
            if let Some((text, rect)) = read_strip_at(frame, x, y) {
                x = rect.right;
                found.push((text, rect));
                continue;
            }
            x += 1;
        }
        y += 1;
    }
    // A strip is seen from each of its guard rows; keep distinct ones.
    found.dedup_by(|a, b| a.1 == b.1);
    let mut unique: Vec<(String, PixelRect)> = Vec::new();
    for f in found {
        if !unique.iter().any(|u| u.1 == f.1) {
            unique.push(f);
        }
    }
    unique
}

fn read_strip_at(frame: &Frame, x: u32, y: u32) -> Option<(String, PixelRect)> {
    let (w, h) = frame.dimensions();
    if !is_guard(frame.pixel(x, y)) {
        return None;
    }
    if (x > 0 && is_guard(frame.pixel(x - 1, y))) || (y > 0 && is_guard(frame.pixel(x, y - 1))) {
        return None;
    }
    let mut cell = 0;
    while x + cell < w && is_guard(frame.pixel(x + cell, y)) {
        cell += 1;
    }
    let height = 8 * cell;
    if y + height > h || !is_guard(frame.pixel(x, y + height - 1)) || (y + height < h && is_guard(frame.pixel(x, y + height))) {
        return None;
    }
    let mut bytes = Vec::new();
    let mut col = 1;
    loop {
        let cx = x + col * cell + cell / 2;
        if cx >= w || bytes.len() > 512 {
            return None;
        }
        if is_guard(frame.pixel(cx, y + cell / 2)) {
            break;
        }
        let mut byte = 0u8;
        for row in 0..8 {
            let p = frame.pixel(cx, y + row * cell + cell / 2);
            if is_guard(p) {
                return None;
            }
            if is_one(p) {
                byte |= 0x80 >> row;
            }
        }
        bytes.push(byte);
        col += 1;
    }
    if bytes.is_empty() {
        return None;
    }
    let rect = PixelRect::new(x, y, x + (col + 1) * cell, y + height);
    Some((String::from_utf8_lossy(&bytes).into_owned(), rect))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_several_strips() {
        let mut f = Frame::solid(300, 120, [30, 60, 90]);
        let a = draw_text(&mut f, 5, 5, "UNO", 2);
        let b = draw_text(&mut f, 40, 60, "Score: 120", 3);
        let got = read_texts(&f);
        assert_eq!(got, vec![("UNO".to_string(), a), ("Score: 120".to_string(), b)]);
    }

    #[test]
    fn cropped_strip_is_ignored() {
        let mut f = Frame::solid(100, 40, [0, 0, 0]);
        draw_text(&mut f, 2, 2, "hello", 2);
        let cut = f.crop_rect(PixelRect::new(0, 0, 8, 40));
        assert!(read_texts(&cut).is_empty());
        assert!(read_texts(&Frame::solid(10, 10, [255, 255, 255])).is_empty());
    }
}
