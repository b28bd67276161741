//! Template-matching corpus: randomized card tables with jitter, written as
//! a trace plus a `truth.json` ledger, and a parallel replay over it.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::card::{Card, CardGame, CardJitter};
use super::world::{GameKind, SimGame, TruthItem};
use super::HarnessError;
use crate::config::GameConfig;
use crate::detect::{ItemDetection, TemplateMatcher};
use crate::exec::Execution;
use crate::frames::{Trace, TraceWriter};

pub const TRUTH_FILE: &str = "truth.json";
pub const FRAME_STEP_MS: u64 = 100;

/// Placement noise: offsets up to `offset_px` base pixels each way and a
/// brightness gain within `1 ± gain`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JitterSpec {
    pub offset_px: i32,
    pub gain: f64,
}

impl JitterSpec {
    pub const NONE: JitterSpec = JitterSpec { offset_px: 0, gain: 0.0 };
    pub const STANDARD: JitterSpec = JitterSpec { offset_px: 2, gain: 0.03 };

    fn sample(&self, rng: &mut ChaCha8Rng) -> CardJitter {
        if *self == JitterSpec::NONE {
            return CardJitter::NONE;
        }
        let o = self.offset_px;
        CardJitter {
            dx: rng.random_range(-o..=o),
            dy: rng.random_range(-o..=o),
            gain: 1.0 + rng.random_range(-self.gain..=self.gain),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusFrame {
    /// 1-based, as in the trace manifest.
    pub index: usize,
    pub t_ms: u64,
    pub items: Vec<TruthItem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusTruth {
    pub game: GameKind,
    pub seed: u64,
    pub scale: u32,
    pub jitter: JitterSpec,
    pub frames: Vec<CorpusFrame>,
}

impl CorpusTruth {
    pub fn save(&self, dir: &Path) -> Result<(), HarnessError> {
        let path = dir.join(TRUTH_FILE);
        let text = serde_json::to_string_pretty(self).expect("truth serializes");
        std::fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))
    }

    pub fn load(dir: &Path) -> Result<Self, HarnessError> {
        let path = dir.join(TRUTH_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::BadScenario(format!("{}: {e}", path.display())))
    }

    pub fn items(&self) -> Vec<Vec<TruthItem>> {
        self.frames.iter().map(|f| f.items.clone()).collect()
    }
}

/// Renders `n` tables of 5 to 7 random cards plus a random discard into
/// `out`, one frame every 100 ms.
pub fn gen_card_corpus(
    n: usize,
    seed: u64,
    jitter: JitterSpec,
    scale: u32,
    out: &Path,
) -> Result<(Trace, CorpusTruth), HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds = Card::kinds();
    let mut writer = TraceWriter::create(out)?;
    let mut frames = Vec::with_capacity(n);
    for i in 0..n {
        let hand: Vec<Card> = (0..rng.random_range(5..=7)).map(|_| kinds[rng.random_range(0..kinds.len())]).collect();
        let discard = kinds[rng.random_range(0..kinds.len())];
        let jitters = (0..=hand.len()).map(|_| jitter.sample(&mut rng)).collect();
        let game = CardGame::new(rng.random(), scale).with_table(hand, discard, jitters);
        let t_ms = i as u64 * FRAME_STEP_MS;
        writer.push_frame(&game.render(t_ms).with_timestamp(t_ms))?;
        frames.push(CorpusFrame { index: i + 1, t_ms, items: game.truth(t_ms).items });
    }
    let trace = writer.finish()?;
    let truth = CorpusTruth { game: GameKind::Card, seed, scale: scale.max(1), jitter, frames };
    truth.save(out)?;
    Ok((trace, truth))
}

/// Template detections for every frame of `trace`, frames spread over
/// `exec`.
pub fn replay_corpus(trace: &Trace, config: &GameConfig, exec: Execution) -> Result<Vec<Vec<ItemDetection>>, HarnessError> {
    let matcher = TemplateMatcher::new(&config.templates, Execution::Sequential);
    let d = &config.detect;
    exec.map_range(trace.len(), |i| {
        let frame = trace.load_frame(i + 1)?;
        Ok(matcher.find(&frame, d.match_threshold, d.item_search.as_ref(), d.nms_iou))
    })
    .into_iter()
    .collect()
}
