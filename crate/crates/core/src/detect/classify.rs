use serde::{Deserialize, Serialize};

use super::ncc::{score_map, FftCache, PreparedTemplate};
use crate::config::{VisualCue, UNKNOWN_STATE};
use crate::exec::Execution;
use crate::frames::{Frame, LumaPlane};

/// Scores closer than this are treated as a tie.
const TIE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateClassification {
    pub state_id: String,
    pub score: f64,
    pub timestamp_ms: u64,
}

impl StateClassification {
    pub fn unknown(score: f64, timestamp_ms: u64) -> Self {
        StateClassification { state_id: UNKNOWN_STATE.to_string(), score, timestamp_ms }
    }

    pub fn is_unknown(&self) -> bool {
        self.state_id == UNKNOWN_STATE
    }
}

/// Anything that can name the current game state from a frame. The built-in
/// implementation is [`CueClassifier`]; an external model can be plugged in
/// behind the same contract.
pub trait StateClassifier: Send + Sync {
    fn classify(&self, frame: &Frame) -> StateClassification;
}

struct PreparedCue {
    event_id: String,
    region: crate::config::NormalizedBlock,
    luma: LumaPlane,
    template: PreparedTemplate,
}

/// Cue set with template statistics computed up front.
pub struct CueClassifier {
    cues: Vec<PreparedCue>,
    accept: f64,
    exec: Execution,
    cache: FftCache,
}

impl std::fmt::Debug for CueClassifier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CueClassifier").field("cues", &self.cues.len()).field("accept", &self.accept).finish()
    }
}

impl CueClassifier {
    pub fn new(cues: &[VisualCue], accept: f64, exec: Execution) -> Self {
        let cues = cues
            .iter()
            .map(|c| {
                let luma = c.image.luma();
                PreparedCue {
                    event_id: c.event_id.clone(),
                    region: c.region,
                    template: PreparedTemplate::new(&luma),
                    luma,
                }
            })
            .collect();
        CueClassifier { cues, accept, exec, cache: FftCache::default() }
    }

    /// Best-alignment score of every cue, in declaration order.
    pub fn scores(&self, frame: &Frame) -> Vec<(String, f64)> {
        self.exec.map(&self.cues, |cue| {
            let crop = frame.crop(&cue.region).luma();
            (cue.event_id.clone(), best_alignment(&crop, cue, &self.cache))
        })
    }
}

impl StateClassifier for CueClassifier {
    fn classify(&self, frame: &Frame) -> StateClassification {
        let mut best: Option<(&str, f64)> = None;
        let scores = self.scores(frame);
        for (id, score) in &scores {
            if best.is_none_or(|(_, b)| *score > b + TIE_EPSILON) {
                best = Some((id, *score));
            }
        }
        match best {
            Some((id, score)) if score >= self.accept => {
                StateClassification { state_id: id.to_string(), score, timestamp_ms: frame.timestamp_ms }
            }
            Some((_, score)) => StateClassification::unknown(score, frame.timestamp_ms),
            None => StateClassification::unknown(0.0, frame.timestamp_ms),
        }
    }
}

fn best_alignment(crop: &LumaPlane, cue: &PreparedCue, cache: &FftCache) -> f64 {
    let (cw, ch) = (crop.width, crop.height);
    let (tw, th) = (cue.template.width, cue.template.height);
    let map = if cw >= tw && ch >= th {
        score_map(crop, &cue.template, cache)
    } else if tw >= cw && th >= ch {
        score_map(&cue.luma, &PreparedTemplate::new(crop), cache)
    } else {
        // Crop is wider but shorter (or the reverse): compare centred overlaps.
        let (w, h) = (cw.min(tw), ch.min(th));
        let a = crop.sub((cw - w) / 2, (ch - h) / 2, w, h);
        let b = cue.luma.sub((tw - w) / 2, (th - h) / 2, w, h);
        score_map(&a, &PreparedTemplate::new(&b), cache)
    };
    map.and_then(|m| m.argmax()).map_or(0.0, |(_, _, s)| s)
}

/// Classifies `frame` against `cues`; `"unknown"` when no cue reaches
/// `accept`. Ties go to the cue declared first.
pub fn classify_state(frame: &Frame, cues: &[VisualCue], accept: f64) -> StateClassification {
    CueClassifier::new(cues, accept, Execution::default()).classify(frame)
}
