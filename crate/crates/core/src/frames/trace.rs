//! On-disk traces: `frames/000001.png ...`, `manifest.jsonl` with one
//! `{"i":1,"t_ms":0}` record per frame and `inputs.jsonl` with input events.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Frame, FrameError, FrameSource, SourceKind};
use crate::hash::Fnv1a;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEvent {
    pub t_ms: u64,
    #[serde(flatten)]
    pub kind: InputKind,
}

/// Input captured from the player. Pointer coordinates are normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputKind {
    Key { key: String },
    MouseMove { x: f64, y: f64 },
    MouseClick { x: f64, y: f64 },
    Voice { audio_b64: String },
}

impl InputEvent {
    pub fn key(t_ms: u64, key: impl Into<String>) -> Self {
        InputEvent { t_ms, kind: InputKind::Key { key: key.into() } }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestRecord {
    i: usize,
    t_ms: u64,
}

/// Summary of a trace directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub dir: PathBuf,
    pub timestamps: Vec<u64>,
    pub inputs: Vec<InputEvent>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn frame_path(&self, index: usize) -> PathBuf {
        frame_path(&self.dir, index)
    }

    /// Loads frame `index` (1-based).
    pub fn load_frame(&self, index: usize) -> Result<Frame, FrameError> {
        let path = self.frame_path(index);
        let bytes = fs::read(&path).map_err(|e| FrameError::io(&path, e))?;
        let frame = Frame::decode_png(&bytes).map_err(|reason| FrameError::DecodeError { index, reason })?;
        Ok(frame.with_timestamp(self.timestamps[index - 1]))
    }

    /// FNV-1a digest over every frame's dimensions and pixels, in order.
    pub fn digest(&self) -> Result<u64, FrameError> {
        let mut h = Fnv1a::new();
        for i in 1..=self.len() {
            let f = self.load_frame(i)?;
            h.write_u32(f.width());
            h.write_u32(f.height());
            h.write(f.pixels());
            h.write(&f.timestamp_ms.to_le_bytes());
        }
        Ok(h.finish())
    }

    pub fn open(dir: impl AsRef<Path>) -> Result<Trace, FrameError> {
        TraceReader::open(dir)
    }
}

fn frame_path(dir: &Path, index: usize) -> PathBuf {
    dir.join("frames").join(format!("{index:06}.png"))
}

/// Incremental trace recorder.
pub struct TraceWriter {
    dir: PathBuf,
    manifest: BufWriter<File>,
    timestamps: Vec<u64>,
    inputs: Vec<InputEvent>,
}

impl TraceWriter {
    pub fn create(dir: impl AsRef<Path>) -> Result<Self, FrameError> {
        let dir = dir.as_ref().to_path_buf();
        let frames = dir.join("frames");
        fs::create_dir_all(&frames).map_err(|e| FrameError::io(&frames, e))?;
        let mpath = dir.join("manifest.jsonl");
        let manifest = File::create(&mpath).map_err(|e| FrameError::io(&mpath, e))?;
        Ok(TraceWriter { dir, manifest: BufWriter::new(manifest), timestamps: Vec::new(), inputs: Vec::new() })
    }

    pub fn push_frame(&mut self, frame: &Frame) -> Result<(), FrameError> {
        if let Some(&prev) = self.timestamps.last() {
            if frame.timestamp_ms <= prev {
                return Err(FrameError::NonMonotonic { prev, next: frame.timestamp_ms });
            }
        }
        let index = self.timestamps.len() + 1;
        frame.save_png(&frame_path(&self.dir, index))?;
        let rec = serde_json::to_string(&ManifestRecord { i: index, t_ms: frame.timestamp_ms }).expect("plain record");
        writeln!(self.manifest, "{rec}").map_err(|e| FrameError::io(&self.dir, e))?;
        self.timestamps.push(frame.timestamp_ms);
        Ok(())
    }

    pub fn push_input(&mut self, event: InputEvent) {
        self.inputs.push(event);
    }

    pub fn finish(mut self) -> Result<Trace, FrameError> {
        self.manifest.flush().map_err(|e| FrameError::io(&self.dir, e))?;
        self.inputs.sort_by_key(|e| e.t_ms);
        let ipath = self.dir.join("inputs.jsonl");
        let mut out = BufWriter::new(File::create(&ipath).map_err(|e| FrameError::io(&ipath, e))?);
        for ev in &self.inputs {
            writeln!(out, "{}", serde_json::to_string(ev).expect("plain record")).map_err(|e| FrameError::io(&ipath, e))?;
        }
        out.flush().map_err(|e| FrameError::io(&ipath, e))?;
        Ok(Trace { dir: self.dir, timestamps: self.timestamps, inputs: self.inputs })
    }
}

/// Drains `source` into a trace directory together with `events`.
pub fn record_trace(
    source: &mut dyn FrameSource,
    events: impl IntoIterator<Item = InputEvent>,
    dir: impl AsRef<Path>,
) -> Result<Trace, FrameError> {
    let mut writer = TraceWriter::create(dir)?;
    while let Some(frame) = source.next_frame()? {
        writer.push_frame(&frame)?;
    }
    for ev in events {
        writer.push_input(ev);
    }
    writer.finish()
}

pub struct TraceReader;

impl TraceReader {
    pub fn open(dir: impl AsRef<Path>) -> Result<Trace, FrameError> {
        let dir = dir.as_ref().to_path_buf();
        let mpath = dir.join("manifest.jsonl");
        let file = File::open(&mpath).map_err(|e| FrameError::io(&mpath, e))?;
        let mut timestamps = Vec::new();
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| FrameError::io(&mpath, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: ManifestRecord = serde_json::from_str(&line)
                .map_err(|e| FrameError::BadTrace(format!("manifest line {}: {e}", n + 1)))?;
            if rec.i != timestamps.len() + 1 {
                return Err(FrameError::BadTrace(format!("manifest index {} out of sequence", rec.i)));
            }
            if let Some(&prev) = timestamps.last() {
                if rec.t_ms <= prev {
                    return Err(FrameError::NonMonotonic { prev, next: rec.t_ms });
                }
            }
            timestamps.push(rec.t_ms);
        }
        let images = match fs::read_dir(dir.join("frames")) {
            Ok(rd) => rd
                .filter_map(Result::ok)
                .filter(|e| e.path().extension().is_some_and(|x| x == "png"))
                .count(),
            Err(_) => 0,
        };
        if images != timestamps.len() {
            return Err(FrameError::BadTrace(format!(
                "manifest lists {} frames but {} images are present",
                timestamps.len(),
                images
            )));
        }
        let ipath = dir.join("inputs.jsonl");
        let mut inputs = Vec::new();
        if ipath.exists() {
            let file = File::open(&ipath).map_err(|e| FrameError::io(&ipath, e))?;
            for (n, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| FrameError::io(&ipath, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let ev: InputEvent = serde_json::from_str(&line)
                    .map_err(|e| FrameError::BadTrace(format!("inputs line {}: {e}", n + 1)))?;
                inputs.push(ev);
            }
        }
        if let (Some(first), Some(last)) = (timestamps.first(), timestamps.last()) {
            if let Some(ev) = inputs.iter().find(|e| e.t_ms < *first || e.t_ms > *last) {
                return Err(FrameError::BadTrace(format!(
                    "input at {} ms lies outside the frame range {first}..={last}",
                    ev.t_ms
                )));
            }
        } else if !inputs.is_empty() {
            return Err(FrameError::BadTrace("inputs recorded without frames".into()));
        }
        Ok(Trace { dir, timestamps, inputs })
    }
}

/// Replays a trace directory as a frame source.
pub struct TraceSource {
    trace: Trace,
    next: usize,
    closed: bool,
}

impl TraceSource {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, FrameError> {
        Ok(TraceSource { trace: TraceReader::open(dir)?, next: 1, closed: false })
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn close(&mut self) {
        self.closed = true;
    }
}

impl FrameSource for TraceSource {
    fn kind(&self) -> SourceKind {
        SourceKind::Trace
    }

    fn nominal_rate(&self) -> f64 {
        match self.trace.timestamps.as_slice() {
            [a, .., b] if b > a => (self.trace.len() - 1) as f64 * 1000.0 / (b - a) as f64,
            _ => 10.0,
        }
    }

    fn next_frame(&mut self) -> Result<Option<Frame>, FrameError> {
        if self.closed {
            return Err(FrameError::SourceClosed);
        }
        if self.next > self.trace.len() {
            return Ok(None);
        }
        let f = self.trace.load_frame(self.next)?;
        self.next += 1;
        Ok(Some(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::VecSource;

    fn frames(n: usize) -> Vec<Frame> {
        (0..n)
            .map(|i| Frame::from_fn(8, 6, move |x, y| [(x * 30) as u8, (y * 40) as u8, (i * 50) as u8]))
            .collect()
    }

    #[test]
    fn record_and_replay_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let originals = frames(5);
        let mut src = VecSource::at_rate(originals.clone(), 10.0);
        let events = vec![InputEvent::key(100, "<left>"), InputEvent::key(300, "<alt>+w")];
        let trace = record_trace(&mut src, events.clone(), dir.path()).unwrap();
        assert_eq!(trace.len(), 5);

        let mut replay = TraceSource::open(dir.path()).unwrap();
        assert_eq!(replay.trace().inputs, events);
        let mut n = 0;
        while let Some(f) = replay.next_frame().unwrap() {
            assert_eq!(f.pixels(), originals[n].pixels());
            assert_eq!(f.timestamp_ms, n as u64 * 100);
            n += 1;
        }
        assert_eq!(n, 5);
        assert!(replay.next_frame().unwrap().is_none());
        assert_eq!(trace.digest().unwrap(), Trace::open(dir.path()).unwrap().digest().unwrap());
    }

    #[test]
    fn corrupt_frame_names_its_index() {
        let dir = tempfile::tempdir().unwrap();
        let mut src = VecSource::at_rate(frames(3), 10.0);
        record_trace(&mut src, [], dir.path()).unwrap();
        fs::write(dir.path().join("frames/000002.png"), b"not a png").unwrap();
        let mut replay = TraceSource::open(dir.path()).unwrap();
        assert!(replay.next_frame().unwrap().is_some());
        match replay.next_frame() {
            Err(FrameError::DecodeError { index, .. }) => assert_eq!(index, 2),
            other => panic!("expected decode error, got {other:?}"),
        }
    }

    #[test]
    fn unwritable_dir_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, b"x").unwrap();
        let mut src = VecSource::at_rate(frames(1), 10.0);
        assert!(matches!(record_trace(&mut src, [], blocker.join("trace")), Err(FrameError::Io { .. })));
    }

    #[test]
    fn closed_source_errors() {
        let dir = tempfile::tempdir().unwrap();
        let mut src = VecSource::at_rate(frames(2), 10.0);
        record_trace(&mut src, [], dir.path()).unwrap();
        let mut replay = TraceSource::open(dir.path()).unwrap();
        replay.close();
        assert!(matches!(replay.next_frame(), Err(FrameError::SourceClosed)));
    }
}
