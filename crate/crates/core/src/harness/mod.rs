//! Deterministic simulated games with ground truth, corpus generation,
//! scorers and audits that drive whole sessions.

mod audit;
mod card;
mod corpus;
mod dialog;
mod merge;
mod metrics;
pub mod paint;
mod scenario;
mod world;

pub use audit::{run_action_audit, run_navigation_audit, ActionAudit, AuditOptions, NavigationAudit};
pub use card::{Card, CardGame, Colour, Face};
pub use corpus::{gen_card_corpus, replay_corpus, CorpusFrame, CorpusTruth, JitterSpec, TRUTH_FILE};
pub use dialog::DialogGame;
pub use merge::MergeGame;
pub use metrics::{score_detections, Metrics, Ratio, MATCH_IOU};
pub use scenario::{run_scenario, Scenario, ScenarioReport, Step, StepKind, StepResult};
pub use world::{GameKind, Hit, SceneTruth, SharedWorld, SimBackend, SimGame, SimSource, SimWorld, Target, TruthItem, TruthText};

use crate::config::{NormalizedBlock, PixelRect};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("unknown game {0:?}")]
    UnknownGame(String),
    #[error("game has no scene {0:?}")]
    UnknownScene(String),
    #[error("target {0:?} is not on screen")]
    UnknownTarget(String),
    #[error("predictions cover {predicted} frames but the truth has {truth}")]
    MisalignedCorpus { predicted: usize, truth: usize },
    #[error("{0}")]
    EmptyDenominator(&'static str),
    #[error("scenario: {0}")]
    BadScenario(String),
    #[error(transparent)]
    Frame(#[from] crate::frames::FrameError),
    #[error(transparent)]
    Session(#[from] crate::orchestrator::SessionError),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.display().to_string(), source }
    }
}

/// Builds a game by kind at base scale (640x360 times `scale`).
pub fn make_game(kind: GameKind, seed: u64, scale: u32) -> Box<dyn SimGame> {
    match kind {
        GameKind::Card => Box::new(CardGame::new(seed, scale)),
        GameKind::Merge => Box::new(MergeGame::new(seed, scale)),
        GameKind::Dialog => Box::new(DialogGame::new(seed, scale)),
    }
}

pub const BASE_WIDTH: u32 = 640;
pub const BASE_HEIGHT: u32 = 360;

/// Maps base-resolution layout units to pixels and normalized blocks.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    pub s: u32,
}

impl Layout {
    pub fn size(self) -> (u32, u32) {
        (BASE_WIDTH * self.s, BASE_HEIGHT * self.s)
    }

    /// Rect at base position `(x, y)` with base size `w` x `h`.
    pub fn rect(self, x: u32, y: u32, w: u32, h: u32) -> PixelRect {
        PixelRect::new(x * self.s, y * self.s, (x + w) * self.s, (y + h) * self.s)
    }

    pub fn block(self, rect: PixelRect) -> NormalizedBlock {
        let (w, h) = self.size();
        NormalizedBlock::from_pixels(rect, w, h).expect("layout rects lie inside the frame")
    }

    pub fn canvas(self, rgb: paint::Rgb) -> crate::frames::Frame {
        let (w, h) = self.size();
        crate::frames::Frame::solid(w, h, rgb)
    }
}

/// Labels, prompts and profiles every simulated bundle shares.
pub(crate) fn common_bundle(config: &mut crate::config::GameConfig) {
    use crate::config::{Chord, HotkeyBinding, HotkeyKind, HotkeyOptions, Profile};
    config.prompts.insert(
        "describe_scene".into(),
        "Describe this game screen for a blind player in two sentences. Previously: {previous}".into(),
    );
    config.prompts.insert("describe_region".into(), "Describe this part of the game screen briefly.".into());
    config.prompts.insert(
        "question".into(),
        "You are assisting a blind player. Looking at this game screen, answer briefly: {question}".into(),
    );
    config.profiles = vec![Profile::blind(), Profile::low_vision()];
    let key = |s: &str| s.parse::<Chord>().expect("static chord");
    config.hotkeys.push(HotkeyBinding {
        key: key("<alt>+r"),
        id: "replay".into(),
        kind: HotkeyKind::ReplayLast,
        options: HotkeyOptions::default(),
        active_states: Vec::new(),
    });
    config.hotkeys.push(HotkeyBinding {
        key: key("<alt>+p"),
        id: "pause".into(),
        kind: HotkeyKind::PauseResume,
        options: HotkeyOptions::default(),
        active_states: Vec::new(),
    });
}
