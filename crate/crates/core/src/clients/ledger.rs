use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ServiceKind {
    Ocr,
    Detector,
    Vlm,
    Asr,
    Tts,
}

impl ServiceKind {
    pub const ALL: [ServiceKind; 5] =
        [ServiceKind::Ocr, ServiceKind::Detector, ServiceKind::Vlm, ServiceKind::Asr, ServiceKind::Tts];

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Default)]
struct Counters {
    calls: AtomicU64,
    input: AtomicU64,
    output: AtomicU64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Usage {
    pub calls: u64,
    pub input_tokens: u64,
    pub output_tokens: u64,
}

/// Cumulative call and token counts per service. Safe to share.
#[derive(Debug, Default)]
pub struct TokenLedger {
    counters: [Counters; 5],
}

impl TokenLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&self, service: ServiceKind, input_tokens: u64, output_tokens: u64) {
        let c = &self.counters[service.index()];
        c.calls.fetch_add(1, Ordering::Relaxed);
        c.input.fetch_add(input_tokens, Ordering::Relaxed);
        c.output.fetch_add(output_tokens, Ordering::Relaxed);
    }

    pub fn usage(&self, service: ServiceKind) -> Usage {
        let c = &self.counters[service.index()];
        Usage {
            calls: c.calls.load(Ordering::Relaxed),
            input_tokens: c.input.load(Ordering::Relaxed),
            output_tokens: c.output.load(Ordering::Relaxed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn concurrent_records_add_up() {
        let ledger = Arc::new(TokenLedger::new());
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let l = ledger.clone();
                std::thread::spawn(move || {
                    for _ in 0..100 {
                        l.record(ServiceKind::Vlm, 3, 2);
                    }
                })
            })
            .collect();
        handles.into_iter().for_each(|h| h.join().unwrap());
        assert_eq!(ledger.usage(ServiceKind::Vlm), Usage { calls: 800, input_tokens: 2400, output_tokens: 1600 });
        assert_eq!(ledger.usage(ServiceKind::Ocr), Usage::default());
    }
}
