use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::wire::{self, b64};
use super::{AsrService, ClientError, DetectorItem, DetectorService, OcrItem, OcrService, TtsService, VlmReply, VlmService};
use crate::describe::SpeechItem;

/// Where and how to reach one service.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceEndpoint {
    pub url: String,
    pub timeout_ms: u64,
    pub retries: u32,
    /// Passed through as `Authorization: Bearer ...` when set.
    pub bearer: Option<String>,
}

impl ServiceEndpoint {
    pub fn new(url: impl Into<String>) -> Self {
        ServiceEndpoint { url: url.into(), timeout_ms: 5_000, retries: 2, bearer: None }
    }

    pub fn with_timeout(mut self, ms: u64) -> Self {
        self.timeout_ms = ms.max(1);
        self
    }

    pub fn with_retries(mut self, retries: u32) -> Self {
        self.retries = retries;
        self
    }

    /// Reads `ASTRA_<NAME>_URL`, plus optional `ASTRA_<NAME>_TIMEOUT_MS` and
    /// `ASTRA_<NAME>_TOKEN`.
    pub fn from_env(name: &str) -> Option<Self> {
        let url = std::env::var(format!("ASTRA_{name}_URL")).ok().filter(|u| !u.is_empty())?;
        let mut ep = ServiceEndpoint::new(url);
        if let Some(ms) = std::env::var(format!("ASTRA_{name}_TIMEOUT_MS")).ok().and_then(|v| v.parse().ok()) {
            ep = ep.with_timeout(ms);
        }
        ep.bearer = std::env::var(format!("ASTRA_{name}_TOKEN")).ok();
        Some(ep)
    }
}

#[derive(Debug)]
struct Poster {
    endpoint: ServiceEndpoint,
    client: reqwest::blocking::Client,
}

impl Poster {
    fn new(endpoint: ServiceEndpoint) -> Self {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_millis(endpoint.timeout_ms.max(1)))
            .build()
            .expect("http client without TLS always builds");
        Poster { endpoint, client }
    }

    fn post<Req: Serialize, Resp: DeserializeOwned>(&self, body: &Req) -> Result<Resp, ClientError> {
        let payload = serde_json::to_vec(body).map_err(|e| ClientError::Malformed(e.to_string()))?;
        let mut attempt = 0;
        loop {
            let mut req = self
                .client
                .post(&self.endpoint.url)
                .header(reqwest::header::CONTENT_TYPE, "application/json")
                .body(payload.clone());
            if let Some(token) = &self.endpoint.bearer {
                req = req.bearer_auth(token);
            }
            let retryable = match req.send() {
                Ok(resp) => {
                    let status = resp.status();
                    if status.is_success() {
                        let bytes = resp.bytes().map_err(|e| self.map_err(e))?;
                        return serde_json::from_slice(&bytes).map_err(|e| ClientError::Malformed(e.to_string()));
                    }
                    if !status.is_server_error() {
                        return Err(ClientError::Http(status.as_u16()));
                    }
                    ClientError::Http(status.as_u16())
                }
                Err(e) => match self.map_err(e) {
                    e @ ClientError::Unavailable(_) => e,
                    other => return Err(other),
                },
            };
            if attempt >= self.endpoint.retries {
                return Err(retryable);
            }
            attempt += 1;
            tracing::debug!(url = %self.endpoint.url, attempt, "retrying after {retryable}");
        }
    }

    fn map_err(&self, e: reqwest::Error) -> ClientError {
        if e.is_timeout() {
            ClientError::Timeout(self.endpoint.timeout_ms)
        } else if e.is_connect() || e.is_request() {
            ClientError::Unavailable(e.to_string())
        } else {
            ClientError::Malformed(e.to_string())
        }
    }
}

#[derive(Debug)]
pub struct HttpOcr(Poster);

impl HttpOcr {
    pub fn new(endpoint: ServiceEndpoint) -> Self {
        HttpOcr(Poster::new(endpoint))
    }
}

impl OcrService for HttpOcr {
    fn recognize(&self, png: &[u8]) -> Result<Vec<OcrItem>, ClientError> {
        let resp: wire::OcrResponse = self.0.post(&wire::OcrRequest { image_b64: b64(png) })?;
        Ok(resp.items)
    }
}

#[derive(Debug)]
pub struct HttpDetector(Poster);

impl HttpDetector {
    pub fn new(endpoint: ServiceEndpoint) -> Self {
        HttpDetector(Poster::new(endpoint))
    }
}

impl DetectorService for HttpDetector {
    fn detect(&self, png: &[u8]) -> Result<Vec<DetectorItem>, ClientError> {
        let resp: wire::DetectorResponse = self.0.post(&wire::OcrRequest { image_b64: b64(png) })?;
        Ok(resp.items)
    }
}

#[derive(Debug)]
pub struct HttpVlm(Poster);

impl HttpVlm {
    pub fn new(endpoint: ServiceEndpoint) -> Self {
        HttpVlm(Poster::new(endpoint))
    }
}

impl VlmService for HttpVlm {
    fn describe(&self, png: &[u8], prompt: &str) -> Result<VlmReply, ClientError> {
        let resp: wire::VlmResponse =
            self.0.post(&wire::VlmRequest { image_b64: b64(png), prompt: prompt.to_string() })?;
        Ok(VlmReply { text: resp.text, input_tokens: resp.usage.input, output_tokens: resp.usage.output })
    }
}

#[derive(Debug)]
pub struct HttpAsr(Poster);

impl HttpAsr {
    pub fn new(endpoint: ServiceEndpoint) -> Self {
        HttpAsr(Poster::new(endpoint))
    }
}

impl AsrService for HttpAsr {
    fn transcribe(&self, audio: &[u8], hotwords: &[String]) -> Result<String, ClientError> {
        let resp: wire::AsrResponse =
            self.0.post(&wire::AsrRequest { audio_b64: b64(audio), hotwords: hotwords.to_vec() })?;
        Ok(resp.text)
    }
}

#[derive(Debug)]
pub struct HttpTts(Poster);

impl HttpTts {
    pub fn new(endpoint: ServiceEndpoint) -> Self {
        HttpTts(Poster::new(endpoint))
    }
}

impl TtsService for HttpTts {
    fn speak(&self, item: &SpeechItem, _t_ms: u64) -> Result<(), ClientError> {
        let resp: wire::TtsResponse = self.0.post(&tts_request(item))?;
        if resp.ok {
            Ok(())
        } else {
            Err(ClientError::Malformed("tts answered ok=false".into()))
        }
    }
}

pub(crate) fn tts_request(item: &SpeechItem) -> wire::TtsRequest {
    let s = item.spatial.unwrap_or_default();
    wire::TtsRequest { text: item.text.clone(), gl: s.gain_left, gr: s.gain_right, pitch_st: s.pitch_shift, delay_ms: s.onset_delay }
}
