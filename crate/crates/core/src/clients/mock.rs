use std::collections::{HashMap, VecDeque};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::wire::{self, b64};
use super::{bitcode, AsrService, ClientError, DetectorItem, DetectorService, OcrItem, OcrService, TtsService, VlmReply, VlmService};
use crate::describe::{Priority, SpeechItem};
use crate::frames::Frame;

fn decode(png: &[u8]) -> Result<Frame, ClientError> {
    Frame::decode_png(png).map_err(|_| ClientError::Precondition("image is not a PNG"))
}

/// OCR mock. Answers from a table keyed by image content hash, else reads
/// the simulators' text strips.
#[derive(Debug, Default)]
pub struct MockOcr {
    table: Mutex<HashMap<u64, Vec<OcrItem>>>,
    calls: AtomicU64,
}

impl MockOcr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_entry(self, image: &Frame, items: Vec<OcrItem>) -> Self {
        self.table.lock().expect("mock table").insert(image.content_key(), items);
        self
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

impl OcrService for MockOcr {
    fn recognize(&self, png: &[u8]) -> Result<Vec<OcrItem>, ClientError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let frame = decode(png)?;
        if let Some(items) = self.table.lock().expect("mock table").get(&frame.content_key()) {
            return Ok(items.clone());
        }
        Ok(bitcode::read_texts(&frame)
            .into_iter()
            .map(|(text, r)| OcrItem {
                text,
                bbox: [r.left as f64, r.top as f64, r.right as f64, r.bottom as f64],
                conf: 0.99,
            })
            .collect())
    }
}

/// Detector mock: a fixed answer per image hash, nothing otherwise.
#[derive(Debug, Default)]
pub struct MockDetector {
    table: HashMap<u64, Vec<DetectorItem>>,
}

impl MockDetector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_entry(mut self, image: &Frame, items: Vec<DetectorItem>) -> Self {
        self.table.insert(image.content_key(), items);
        self
    }
}

impl DetectorService for MockDetector {
    fn detect(&self, png: &[u8]) -> Result<Vec<DetectorItem>, ClientError> {
        Ok(self.table.get(&decode(png)?.content_key()).cloned().unwrap_or_default())
    }
}

/// VLM mock with deterministic text and token usage.
///
/// Rules are checked first (image hash and/or prompt substring); the default
/// answer lists any text strips visible in the image.
#[derive(Debug, Default)]
pub struct MockVlm {
    rules: Vec<(Option<u64>, Option<String>, String)>,
    calls: AtomicU64,
    served_in: AtomicU64,
    served_out: AtomicU64,
}

impl MockVlm {
    pub fn new() -> Self {
        Self::default()
    }

    /// Canned answer for one image, any prompt.
    pub fn with_image(mut self, image: &Frame, text: impl Into<String>) -> Self {
        self.rules.push((Some(image.content_key()), None, text.into()));
        self
    }

    /// Canned answer for any image whose prompt contains `needle`.
    pub fn with_prompt(mut self, needle: impl Into<String>, text: impl Into<String>) -> Self {
        self.rules.push((None, Some(needle.into()), text.into()));
        self
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// Token totals over every response served.
    pub fn served(&self) -> (u64, u64) {
        (self.served_in.load(Ordering::Relaxed), self.served_out.load(Ordering::Relaxed))
    }

    fn answer(&self, frame: &Frame, prompt: &str) -> String {
        let key = frame.content_key();
        for (img, needle, text) in &self.rules {
            let img_ok = img.is_none_or(|k| k == key);
            let prompt_ok = needle.as_deref().is_none_or(|n| prompt.contains(n));
            if img_ok && prompt_ok {
                return text.clone();
            }
        }
        let texts: Vec<String> = bitcode::read_texts(frame).into_iter().map(|(t, _)| t).collect();
        if texts.is_empty() {
            format!("A {}x{} scene (ref {:08x}).", frame.width(), frame.height(), key as u32)
        } else {
            format!("The screen shows: {}.", texts.join(", "))
        }
    }
}

impl VlmService for MockVlm {
    fn describe(&self, png: &[u8], prompt: &str) -> Result<VlmReply, ClientError> {
        let frame = decode(png)?;
        let text = self.answer(&frame, prompt);
        let input_tokens = 85 + prompt.chars().count() as u64 / 4 + u64::from(frame.width() * frame.height() / 4096);
        let output_tokens = 1 + text.chars().count() as u64 / 4;
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.served_in.fetch_add(input_tokens, Ordering::Relaxed);
        self.served_out.fetch_add(output_tokens, Ordering::Relaxed);
        Ok(VlmReply { text, input_tokens, output_tokens })
    }
}

/// ASR mock: replays a script, else treats the audio bytes as UTF-8 text.
#[derive(Debug, Default)]
pub struct MockAsr {
    script: Mutex<VecDeque<String>>,
    requests: Mutex<Vec<String>>,
}

impl MockAsr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn scripted<I, S>(lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        MockAsr { script: Mutex::new(lines.into_iter().map(Into::into).collect()), requests: Mutex::default() }
    }

    /// JSON bodies of every request received, in order.
    pub fn requests(&self) -> Vec<String> {
        self.requests.lock().expect("asr log").clone()
    }
}

impl AsrService for MockAsr {
    fn transcribe(&self, audio: &[u8], hotwords: &[String]) -> Result<String, ClientError> {
        if audio.is_empty() {
            return Err(ClientError::Precondition("audio must not be empty"));
        }
        let body = wire::AsrRequest { audio_b64: b64(audio), hotwords: hotwords.to_vec() };
        self.requests.lock().expect("asr log").push(serde_json::to_string(&body).expect("serializable"));
        if let Some(line) = self.script.lock().expect("asr script").pop_front() {
            return Ok(line);
        }
        Ok(String::from_utf8_lossy(audio).trim().to_string())
    }
}

/// Always fails with [`ClientError::Unavailable`].
#[derive(Debug, Default, Clone, Copy)]
pub struct Unavailable;

impl OcrService for Unavailable {
    fn recognize(&self, _: &[u8]) -> Result<Vec<OcrItem>, ClientError> {
        Err(ClientError::Unavailable("service down".into()))
    }
}

impl VlmService for Unavailable {
    fn describe(&self, _: &[u8], _: &str) -> Result<VlmReply, ClientError> {
        Err(ClientError::Unavailable("service down".into()))
    }
}

impl AsrService for Unavailable {
    fn transcribe(&self, _: &[u8], _: &[String]) -> Result<String, ClientError> {
        Err(ClientError::Unavailable("service down".into()))
    }
}

impl TtsService for Unavailable {
    fn speak(&self, _: &SpeechItem, _: u64) -> Result<(), ClientError> {
        Err(ClientError::Unavailable("service down".into()))
    }
}

/// One line of `speech.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeechRecord {
    pub t_ms: u64,
    pub text: String,
    pub priority: Priority,
    pub gl: f64,
    pub gr: f64,
    pub pitch: f64,
    pub delay: f64,
}

impl SpeechRecord {
    pub fn new(item: &SpeechItem, t_ms: u64) -> Self {
        let r = super::http::tts_request(item);
        SpeechRecord { t_ms, text: r.text, priority: item.priority, gl: r.gl, gr: r.gr, pitch: r.pitch_st, delay: r.delay_ms }
    }

    pub fn read_all(path: &Path) -> std::io::Result<Vec<SpeechRecord>> {
        let text = std::fs::read_to_string(path)?;
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e)))
            .collect()
    }
}

/// Test speaker that appends one record per utterance to `speech.jsonl`.
#[derive(Debug)]
pub struct TranscriptTts {
    path: PathBuf,
    file: Mutex<File>,
}

impl TranscriptTts {
    pub fn create(path: impl Into<PathBuf>) -> std::io::Result<Self> {
        let path = path.into();
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(TranscriptTts { path, file: Mutex::new(file) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl TtsService for TranscriptTts {
    fn speak(&self, item: &SpeechItem, t_ms: u64) -> Result<(), ClientError> {
        let line = serde_json::to_string(&SpeechRecord::new(item, t_ms)).expect("serializable");
        let mut f = self.file.lock().expect("transcript");
        writeln!(f, "{line}").map_err(|e| ClientError::Unavailable(e.to_string()))
    }
}

/// In-memory speaker; can be told to time out a number of times first.
#[derive(Debug, Default)]
pub struct RecordingTts {
    spoken: Mutex<Vec<SpeechRecord>>,
    failures: AtomicU32,
}

impl RecordingTts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn failing(times: u32) -> Self {
        RecordingTts { spoken: Mutex::default(), failures: AtomicU32::new(times) }
    }

    pub fn spoken(&self) -> Vec<SpeechRecord> {
        self.spoken.lock().expect("spoken").clone()
    }

    pub fn texts(&self) -> Vec<String> {
        self.spoken().into_iter().map(|r| r.text).collect()
    }
}

impl TtsService for RecordingTts {
    fn speak(&self, item: &SpeechItem, t_ms: u64) -> Result<(), ClientError> {
        if self.failures.fetch_update(Ordering::Relaxed, Ordering::Relaxed, |n| n.checked_sub(1)).is_ok() {
            return Err(ClientError::Timeout(0));
        }
        self.spoken.lock().expect("spoken").push(SpeechRecord::new(item, t_ms));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ocr_table_then_strips() {
        let blank = Frame::solid(20, 20, [0, 0, 0]);
        let known = Frame::solid(20, 20, [1, 2, 3]);
        let items = vec![
            OcrItem { text: "A".into(), bbox: [0.0, 0.0, 5.0, 5.0], conf: 0.9 },
            OcrItem { text: "B".into(), bbox: [6.0, 6.0, 9.0, 9.0], conf: 0.8 },
        ];
        let ocr = MockOcr::new().with_entry(&known, items.clone());
        assert_eq!(ocr.recognize(&known.encode_png()).unwrap(), items);
        assert!(ocr.recognize(&blank.encode_png()).unwrap().is_empty());
        let mut strip = Frame::solid(80, 30, [0, 0, 40]);
        bitcode::draw_text(&mut strip, 3, 3, "Hi", 2);
        assert_eq!(ocr.recognize(&strip.encode_png()).unwrap()[0].text, "Hi");
        assert_eq!(ocr.calls(), 3);
    }

    #[test]
    fn vlm_is_deterministic_and_prompt_sensitive() {
        let f = Frame::solid(8, 8, [5, 5, 5]);
        let vlm = MockVlm::new().with_image(&f, "A grey square.");
        let png = f.encode_png();
        let a = vlm.describe(&png, "Describe").unwrap();
        let b = vlm.describe(&png, "Describe").unwrap();
        let c = vlm.describe(&png, "Describe the colours").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.text, "A grey square.");
        assert_ne!(a.input_tokens, c.input_tokens);
        assert_eq!(vlm.calls(), 3);
    }

    #[test]
    fn asr_forwards_hotwords_verbatim() {
        let asr = MockAsr::scripted(["play red five"]);
        let hot = vec!["Uno".to_string(), "Skip".to_string()];
        assert_eq!(asr.transcribe(b"pcm", &hot).unwrap(), "play red five");
        assert_eq!(asr.requests(), vec![r#"{"audio_b64":"cGNt","hotwords":["Uno","Skip"]}"#.to_string()]);
        assert_eq!(asr.transcribe(b"what is on the table", &[]).unwrap(), "what is on the table");
        assert!(asr.transcribe(&[], &hot).is_err());
    }

    #[test]
    fn transcript_appends_lines() {
        let dir = tempfile::tempdir().unwrap();
        let tts = TranscriptTts::create(dir.path().join("speech.jsonl")).unwrap();
        tts.speak(&SpeechItem::normal("one", crate::describe::Origin::Event), 10).unwrap();
        tts.speak(&SpeechItem::critical("two", crate::describe::Origin::Event), 20).unwrap();
        let recs = SpeechRecord::read_all(tts.path()).unwrap();
        assert_eq!(recs.iter().map(|r| r.text.as_str()).collect::<Vec<_>>(), ["one", "two"]);
        assert_eq!(recs[1].t_ms, 20);
        assert_eq!(recs[1].priority, Priority::Critical);
    }
}
