//! Clients for the external services (OCR, object detector, VLM, ASR, TTS).
//!
//! Every service speaks HTTP POST with JSON bodies (see [`wire`]). Each has a
//! deterministic in-process mock so sessions run fully offline.

pub mod bitcode;
mod http;
mod ledger;
mod mock;
pub mod wire;

use std::sync::Arc;

pub use http::{HttpAsr, HttpDetector, HttpOcr, HttpTts, HttpVlm, ServiceEndpoint};
pub use ledger::{ServiceKind, TokenLedger, Usage};
pub use mock::{MockAsr, MockDetector, MockOcr, MockVlm, RecordingTts, SpeechRecord, TranscriptTts, Unavailable};
pub use wire::{DetectorItem, OcrItem};

use crate::describe::SpeechItem;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClientError {
    #[error("service unavailable: {0}")]
    Unavailable(String),
    #[error("request timed out after {0} ms")]
    Timeout(u64),
    #[error("service answered HTTP {0}")]
    Http(u16),
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}

/// Reply of a vision-language model call.
#[derive(Debug, Clone, PartialEq)]
pub struct VlmReply {
    pub text: String,
    pub input_tokens: u64,
    pub output_tokens: u64,
}

pub trait OcrService: Send + Sync {
    /// Text regions in pixel coordinates of the submitted PNG.
    fn recognize(&self, png: &[u8]) -> Result<Vec<OcrItem>, ClientError>;
}

pub trait DetectorService: Send + Sync {
    fn detect(&self, png: &[u8]) -> Result<Vec<DetectorItem>, ClientError>;
}

pub trait VlmService: Send + Sync {
    fn describe(&self, png: &[u8], prompt: &str) -> Result<VlmReply, ClientError>;
}

pub trait AsrService: Send + Sync {
    fn transcribe(&self, audio: &[u8], hotwords: &[String]) -> Result<String, ClientError>;
}

pub trait TtsService: Send + Sync {
    /// Speaks one item; `t_ms` is the session time it starts at.
    fn speak(&self, item: &SpeechItem, t_ms: u64) -> Result<(), ClientError>;

    /// Cuts off the utterance in progress, if the backend can.
    fn interrupt(&self) {}
}

/// The request-response services a session talks to, plus the shared
/// token ledger. Speech output is owned by the speech queue instead.
#[derive(Clone)]
pub struct Clients {
    pub ocr: Arc<dyn OcrService>,
    pub detector: Option<Arc<dyn DetectorService>>,
    pub vlm: Arc<dyn VlmService>,
    pub asr: Arc<dyn AsrService>,
    pub ledger: Arc<TokenLedger>,
}

impl std::fmt::Debug for Clients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Clients").field("detector", &self.detector.is_some()).finish_non_exhaustive()
    }
}

impl Clients {
    pub fn new(ocr: Arc<dyn OcrService>, vlm: Arc<dyn VlmService>, asr: Arc<dyn AsrService>) -> Self {
        Clients { ocr, detector: None, vlm, asr, ledger: Arc::new(TokenLedger::new()) }
    }

    /// Offline mocks for every service.
    pub fn mock() -> Self {
        Self::new(Arc::new(MockOcr::new()), Arc::new(MockVlm::new()), Arc::new(MockAsr::new()))
    }

    /// HTTP clients for services whose `ASTRA_<SERVICE>_URL` variable is set,
    /// mocks for the rest.
    pub fn from_env() -> Self {
        let mut clients = Self::mock();
        if let Some(ep) = ServiceEndpoint::from_env("OCR") {
            clients.ocr = Arc::new(HttpOcr::new(ep));
        }
        if let Some(ep) = ServiceEndpoint::from_env("DETECTOR") {
            clients.detector = Some(Arc::new(HttpDetector::new(ep)));
        }
        if let Some(ep) = ServiceEndpoint::from_env("VLM") {
            clients.vlm = Arc::new(HttpVlm::new(ep));
        }
        if let Some(ep) = ServiceEndpoint::from_env("ASR") {
            clients.asr = Arc::new(HttpAsr::new(ep));
        }
        clients
    }

    pub fn call_ocr(&self, png: &[u8]) -> Result<Vec<OcrItem>, ClientError> {
        if png.is_empty() {
            return Err(ClientError::Precondition("image must not be empty"));
        }
        let items = self.ocr.recognize(png)?;
        self.ledger.record(ServiceKind::Ocr, 0, 0);
        Ok(items)
    }

    pub fn call_detector(&self, png: &[u8]) -> Result<Vec<DetectorItem>, ClientError> {
        let detector = self.detector.as_ref().ok_or_else(|| ClientError::Unavailable("no detector configured".into()))?;
        let items = detector.detect(png)?;
        self.ledger.record(ServiceKind::Detector, 0, 0);
        Ok(items)
    }

    pub fn call_vlm(&self, png: &[u8], prompt: &str) -> Result<VlmReply, ClientError> {
        if prompt.trim().is_empty() {
            return Err(ClientError::Precondition("prompt must not be empty"));
        }
        let reply = self.vlm.describe(png, prompt)?;
        self.ledger.record(ServiceKind::Vlm, reply.input_tokens, reply.output_tokens);
        Ok(reply)
    }

    pub fn call_asr(&self, audio: &[u8], hotwords: &[String]) -> Result<String, ClientError> {
        if audio.is_empty() {
            return Err(ClientError::Precondition("audio must not be empty"));
        }
        let text = self.asr.transcribe(audio, hotwords)?;
        self.ledger.record(ServiceKind::Asr, 0, 0);
        Ok(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ledger_matches_mock_counters() {
        let vlm = Arc::new(MockVlm::new());
        let clients = Clients::new(Arc::new(MockOcr::new()), vlm.clone(), Arc::new(MockAsr::new()));
        let png = crate::frames::Frame::solid(4, 4, [9, 9, 9]).encode_png();
        for prompt in ["Describe the scene.", "What changed?", "Describe the scene."] {
            clients.call_vlm(&png, prompt).unwrap();
        }
        let served = vlm.served();
        let usage = clients.ledger.usage(ServiceKind::Vlm);
        assert_eq!(usage.calls, 3);
        assert_eq!(usage.calls, vlm.calls());
        assert_eq!((usage.input_tokens, usage.output_tokens), served);
    }

    #[test]
    fn preconditions() {
        let c = Clients::mock();
        assert!(matches!(c.call_asr(&[], &[]), Err(ClientError::Precondition(_))));
        assert!(matches!(c.call_vlm(b"x", "  "), Err(ClientError::Precondition(_))));
        assert!(matches!(c.call_ocr(&[]), Err(ClientError::Precondition(_))));
        assert!(matches!(c.call_detector(b"x"), Err(ClientError::Unavailable(_))));
    }
}
