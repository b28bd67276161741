use std::fmt;

use serde::{Deserialize, Serialize};

/// Axis-aligned region in fractions of frame width/height.
///
/// Always satisfies `0 <= x1 < x2 <= 1` and `0 <= y1 < y2 <= 1`; the only way
/// to obtain one is through [`NormalizedBlock::new`] (or deserialization, which
/// goes through it).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct NormalizedBlock {
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid block [{0}, {1}, {2}, {3}]: expected 0 <= x1 < x2 <= 1 and 0 <= y1 < y2 <= 1")]
pub struct BadBlock(pub f64, pub f64, pub f64, pub f64);

impl NormalizedBlock {
    pub const FULL: NormalizedBlock = NormalizedBlock { x1: 0.0, y1: 0.0, x2: 1.0, y2: 1.0 };

    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self, BadBlock> {
        let ok = [x1, y1, x2, y2].iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v))
            && x1 < x2
            && y1 < y2;
        if ok {
            Ok(NormalizedBlock { x1, y1, x2, y2 })
        } else {
            Err(BadBlock(x1, y1, x2, y2))
        }
    }

    /// Normalizes an integer pixel rect against a frame of `width` x `height`.
    pub fn from_pixels(rect: PixelRect, width: u32, height: u32) -> Result<Self, BadBlock> {
        let w = f64::from(width.max(1));
        let h = f64::from(height.max(1));
        Self::new(
            f64::from(rect.left) / w,
            f64::from(rect.top) / h,
            (f64::from(rect.right) / w).min(1.0),
            (f64::from(rect.bottom) / h).min(1.0),
        )
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }
    pub fn y1(&self) -> f64 {
        self.y1
    }
    pub fn x2(&self) -> f64 {
        self.x2
    }
    pub fn y2(&self) -> f64 {
        self.y2
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0)
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Inclusive containment test for a normalized point.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x1 && x <= self.x2 && y >= self.y1 && y <= self.y2
    }

    pub fn intersection_area(&self, other: &NormalizedBlock) -> f64 {
        let w = self.x2.min(other.x2) - self.x1.max(other.x1);
        let h = self.y2.min(other.y2) - self.y1.max(other.y1);
        if w <= 0.0 || h <= 0.0 {
            0.0
        } else {
            w * h
        }
    }

    pub fn iou(&self, other: &NormalizedBlock) -> f64 {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            inter / union
        }
    }

    /// Maps a block expressed relative to `self` into the coordinates `self`
    /// lives in.
    pub fn compose(&self, inner: &NormalizedBlock) -> NormalizedBlock {
        let w = self.width();
        let h = self.height();
        NormalizedBlock {
            x1: self.x1 + inner.x1 * w,
            y1: self.y1 + inner.y1 * h,
            x2: (self.x1 + inner.x2 * w).min(1.0),
            y2: (self.y1 + inner.y2 * h).min(1.0),
        }
    }
}

impl TryFrom<[f64; 4]> for NormalizedBlock {
    type Error = BadBlock;

    fn try_from(v: [f64; 4]) -> Result<Self, Self::Error> {
        NormalizedBlock::new(v[0], v[1], v[2], v[3])
    }
}

impl From<NormalizedBlock> for [f64; 4] {
    fn from(b: NormalizedBlock) -> Self {
        b.as_array()
    }
}

impl fmt::Display for NormalizedBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}, {}]", self.x1, self.y1, self.x2, self.y2)
    }
}

/// Pixel rectangle, half-open: `left <= x < right`, `top <= y < bottom`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PixelRect {
    pub left: u32,
    pub top: u32,
    pub right: u32,
    pub bottom: u32,
}

impl PixelRect {
    pub fn new(left: u32, top: u32, right: u32, bottom: u32) -> Self {
        PixelRect { left, top, right, bottom }
    }

    pub fn width(&self) -> u32 {
        self.right - self.left
    }

    pub fn height(&self) -> u32 {
        self.bottom - self.top
    }

    pub fn center(&self) -> (u32, u32) {
        ((self.left + self.right) / 2, (self.top + self.bottom) / 2)
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.left && x < self.right && y >= self.top && y < self.bottom
    }
}

fn edge(fraction: f64, dim: u32) -> u32 {
    (fraction * f64::from(dim)).round().clamp(0.0, f64::from(dim)) as u32
}

/// Converts a normalized block to a pixel rect of a `width` x `height` frame.
///
/// Each edge is `round(fraction * dimension)`; the result is clamped so it is
/// at least one pixel wide and tall and lies inside the frame.
pub fn denormalize(block: &NormalizedBlock, width: u32, height: u32) -> PixelRect {
    let width = width.max(1);
    let height = height.max(1);
    let (left, right) = clamp_span(edge(block.x1, width), edge(block.x2, width), width);
    let (top, bottom) = clamp_span(edge(block.y1, height), edge(block.y2, height), height);
    PixelRect { left, top, right, bottom }
}

fn clamp_span(lo: u32, hi: u32, dim: u32) -> (u32, u32) {
    let lo = lo.min(dim - 1);
    let hi = hi.max(lo + 1).min(dim);
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(x1: f64, y1: f64, x2: f64, y2: f64) -> NormalizedBlock {
        NormalizedBlock::new(x1, y1, x2, y2).unwrap()
    }

    #[test]
    fn denormalize_settings_button() {
        let r = denormalize(&b(0.4273, 0.0985, 0.6030, 0.2125), 1920, 1080);
        assert_eq!(r, PixelRect::new(820, 106, 1158, 230));
    }

    #[test]
    fn denormalize_full_and_tiny() {
        assert_eq!(denormalize(&NormalizedBlock::FULL, 640, 480), PixelRect::new(0, 0, 640, 480));
        assert_eq!(denormalize(&b(0.5, 0.5, 0.5004, 0.5004), 100, 100), PixelRect::new(50, 50, 51, 51));
        assert_eq!(denormalize(&b(0.999, 0.999, 1.0, 1.0), 100, 100), PixelRect::new(99, 99, 100, 100));
    }

    #[test]
    fn degenerate_blocks_rejected() {
        assert!(NormalizedBlock::new(0.5, 0.2, 0.5, 0.4).is_err());
        assert!(NormalizedBlock::new(0.1, 0.2, 0.5, 1.2).is_err());
        assert!(NormalizedBlock::new(f64::NAN, 0.2, 0.5, 0.4).is_err());
        let err = serde_json::from_str::<NormalizedBlock>("[0.5,0.2,0.5,0.4]").unwrap_err();
        assert!(err.to_string().contains("invalid block"));
    }

    #[test]
    fn iou_of_disjoint_and_identical() {
        let a = b(0.0, 0.0, 0.5, 0.5);
        assert_eq!(a.iou(&b(0.5, 0.0, 1.0, 0.5)), 0.0);
        assert!((a.iou(&a) - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn normalize_round_trip_within_half_pixel(
            w in 100u32..2000, h in 100u32..2000,
            a in 0.0f64..1.0, bb in 0.0f64..1.0, c in 0.0f64..1.0, d in 0.0f64..1.0,
        ) {
            let (l, r) = {
                let l = (a * f64::from(w - 1)) as u32;
                let r = l + 1 + (bb * f64::from(w - l - 1)) as u32;
                (l, r)
            };
            let (t, btm) = {
                let t = (c * f64::from(h - 1)) as u32;
                let btm = t + 1 + (d * f64::from(h - t - 1)) as u32;
                (t, btm)
            };
            let rect = PixelRect::new(l, t, r, btm);
            let back = denormalize(&NormalizedBlock::from_pixels(rect, w, h).unwrap(), w, h);
            prop_assert!(back.left.abs_diff(rect.left) == 0);
            prop_assert!(back.top.abs_diff(rect.top) == 0);
            prop_assert!(back.right.abs_diff(rect.right) == 0);
            prop_assert!(back.bottom.abs_diff(rect.bottom) == 0);
        }

        #[test]
        fn denormalized_rect_inside_frame(
            w in 1u32..3000, h in 1u32..3000,
            x1 in 0.0f64..0.99, y1 in 0.0f64..0.99, dw in 0.0001f64..1.0, dh in 0.0001f64..1.0,
        ) {
            let blk = b(x1, y1, (x1 + dw).min(1.0), (y1 + dh).min(1.0));
            let r = denormalize(&blk, w, h);
            prop_assert!(r.left < r.right && r.right <= w);
            prop_assert!(r.top < r.bottom && r.bottom <= h);
        }
    }
}
