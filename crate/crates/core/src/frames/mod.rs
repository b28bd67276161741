//! Frames, frame sources and recorded traces.

mod source;
mod trace;

use std::io::Cursor;

pub use source::{FrameSource, SourceKind, VecSource};
pub use trace::{record_trace, InputEvent, InputKind, Trace, TraceReader, TraceSource, TraceWriter};

use crate::config::{denormalize, NormalizedBlock, PixelRect};
use crate::hash::Fnv1a;

#[derive(Debug, thiserror::Error)]
pub enum FrameError {
    #[error("frame source is closed")]
    SourceClosed,
    #[error("cannot decode frame {index}: {reason}")]
    DecodeError { index: usize, reason: String },
    #[error("pixel buffer has {got} bytes, expected {expected}")]
    BadBuffer { got: usize, expected: usize },
    #[error("frame timestamps must increase: {prev} then {next}")]
    NonMonotonic { prev: u64, next: u64 },
    #[error("trace is inconsistent: {0}")]
    BadTrace(String),
    #[error("no live capture backend is available in this build")]
    NoLiveBackend,
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl FrameError {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        FrameError::Io { path: path.as_ref().display().to_string(), source }
    }
}

/// A timestamped 8-bit RGB raster, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Frame {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
    /// Milliseconds since session start.
    pub timestamp_ms: u64,
}

impl std::fmt::Debug for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Frame")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("timestamp_ms", &self.timestamp_ms)
            .field("key", &format_args!("{:016x}", self.content_key()))
            .finish()
    }
}

impl Frame {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>, timestamp_ms: u64) -> Result<Self, FrameError> {
        let expected = width as usize * height as usize * 3;
        if width == 0 || height == 0 || pixels.len() != expected {
            return Err(FrameError::BadBuffer { got: pixels.len(), expected });
        }
        Ok(Frame { width, height, pixels, timestamp_ms })
    }

    pub fn solid(width: u32, height: u32, rgb: [u8; 3]) -> Self {
        let pixels = rgb.iter().copied().cycle().take(width as usize * height as usize * 3).collect();
        Frame { width, height, pixels, timestamp_ms: 0 }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Self {
        let mut pixels = Vec::with_capacity(width as usize * height as usize * 3);
        for y in 0..height {
            for x in 0..width {
                pixels.extend_from_slice(&f(x, y));
            }
        }
        Frame { width, height, pixels, timestamp_ms: 0 }
    }

    pub fn with_timestamp(mut self, t_ms: u64) -> Self {
        self.timestamp_ms = t_ms;
        self
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn put_pixel(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    /// Sub-image covered by `block`; the timestamp is preserved.
    pub fn crop(&self, block: &NormalizedBlock) -> Frame {
        self.crop_rect(denormalize(block, self.width, self.height))
    }

    /// Sub-image for a pixel rect. The rect is clamped to the frame and is
    /// never smaller than 1x1.
    pub fn crop_rect(&self, rect: PixelRect) -> Frame {
        let left = rect.left.min(self.width - 1);
        let top = rect.top.min(self.height - 1);
        let right = rect.right.clamp(left + 1, self.width);
        let bottom = rect.bottom.clamp(top + 1, self.height);
        let w = (right - left) as usize;
        let mut pixels = Vec::with_capacity(w * (bottom - top) as usize * 3);
        for y in top..bottom {
            let start = (y as usize * self.width as usize + left as usize) * 3;
            pixels.extend_from_slice(&self.pixels[start..start + w * 3]);
        }
        Frame { width: right - left, height: bottom - top, pixels, timestamp_ms: self.timestamp_ms }
    }

    /// Grayscale plane with luma = 0.299 R + 0.587 G + 0.114 B.
    pub fn luma(&self) -> LumaPlane {
        let data = self
            .pixels
            .chunks_exact(3)
            .map(|p| 0.299 * f64::from(p[0]) + 0.587 * f64::from(p[1]) + 0.114 * f64::from(p[2]))
            .collect();
        LumaPlane { width: self.width as usize, height: self.height as usize, data }
    }

    /// 64-bit FNV-1a over dimensions and raw pixels.
    pub fn content_key(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write_u32(self.width);
        h.write_u32(self.height);
        h.write(&self.pixels);
        h.finish()
    }

    pub fn encode_png(&self) -> Vec<u8> {
        let mut out = Vec::new();
        image::write_buffer_with_format(
            &mut Cursor::new(&mut out),
            &self.pixels,
            self.width,
            self.height,
            image::ExtendedColorType::Rgb8,
            image::ImageFormat::Png,
        )
        .expect("png encoding into memory cannot fail");
        out
    }

    pub fn decode_png(bytes: &[u8]) -> Result<Frame, String> {
        let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png).map_err(|e| e.to_string())?;
        let rgb = img.to_rgb8();
        let (w, h) = rgb.dimensions();
        Frame::new(w, h, rgb.into_raw(), 0).map_err(|e| e.to_string())
    }

    pub fn save_png(&self, path: &std::path::Path) -> Result<(), FrameError> {
        std::fs::write(path, self.encode_png()).map_err(|e| FrameError::io(path, e))
    }

    pub fn load_png(path: &std::path::Path) -> Result<Frame, FrameError> {
        let bytes = std::fs::read(path).map_err(|e| FrameError::io(path, e))?;
        Frame::decode_png(&bytes).map_err(|reason| FrameError::DecodeError { index: 0, reason })
    }
}

/// Single-channel f64 image.
#[derive(Debug, Clone, PartialEq)]
pub struct LumaPlane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl LumaPlane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height);
        LumaPlane { width, height, data }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn sub(&self, x: usize, y: usize, w: usize, h: usize) -> LumaPlane {
        let mut data = Vec::with_capacity(w * h);
        for yy in y..y + h {
            data.extend_from_slice(&self.row(yy)[x..x + w]);
        }
        LumaPlane { width: w, height: h, data }
    }
}
