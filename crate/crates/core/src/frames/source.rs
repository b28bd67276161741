use serde::{Deserialize, Serialize};

use super::{Frame, FrameError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Live,
    Trace,
    Simulator,
}

/// A single-consumer stream of frames in timestamp order.
pub trait FrameSource {
    fn kind(&self) -> SourceKind;

    /// Nominal delivery rate in frames per second.
    fn nominal_rate(&self) -> f64;

    /// Next frame, or `Ok(None)` once the stream is exhausted. Live sources
    /// never return `None`.
    fn next_frame(&mut self) -> Result<Option<Frame>, FrameError>;
}

/// In-memory source over pre-built frames; mostly useful in tests.
#[derive(Debug, Default)]
pub struct VecSource {
    frames: std::collections::VecDeque<Frame>,
    rate: f64,
    last_t: Option<u64>,
}

impl VecSource {
    pub fn new(frames: Vec<Frame>, rate: f64) -> Self {
        VecSource { frames: frames.into(), rate, last_t: None }
    }

    /// Stamps `frames` at a fixed `rate` starting from t = 0.
    pub fn at_rate(frames: Vec<Frame>, rate: f64) -> Self {
        let step = (1000.0 / rate).round() as u64;
        let frames = frames
            .into_iter()
            .enumerate()
            .map(|(i, f)| f.with_timestamp(i as u64 * step))
            .collect();
        Self::new(frames, rate)
    }
}

impl FrameSource for VecSource {
    fn kind(&self) -> SourceKind {
        SourceKind::Trace
    }

    fn nominal_rate(&self) -> f64 {
        self.rate
    }

    fn next_frame(&mut self) -> Result<Option<Frame>, FrameError> {
        let Some(f) = self.frames.pop_front() else {
            return Ok(None);
        };
        if let Some(prev) = self.last_t {
            if f.timestamp_ms <= prev {
                return Err(FrameError::NonMonotonic { prev, next: f.timestamp_ms });
            }
        }
        self.last_t = Some(f.timestamp_ms);
        Ok(Some(f))
    }
}
