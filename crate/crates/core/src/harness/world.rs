//! The simulated-game contract, a shared world clock and the simulator
//! ends of the frame source and output backend.

use std::collections::VecDeque;
use std::sync::{Arc, Mutex, MutexGuard};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::act::{BackendError, OutputBackend};
use crate::config::{denormalize, GameConfig, NormalizedBlock};
use crate::frames::{Frame, FrameError, FrameSource, SourceKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    #[serde(alias = "uno")]
    Card,
    Merge,
    Dialog,
}

impl GameKind {
    pub const ALL: [GameKind; 3] = [GameKind::Card, GameKind::Merge, GameKind::Dialog];

    pub fn name(self) -> &'static str {
        match self {
            GameKind::Card => "card",
            GameKind::Merge => "merge",
            GameKind::Dialog => "dialog",
        }
    }
}

impl std::str::FromStr for GameKind {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uno" => Ok(GameKind::Card),
            _ => GameKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| HarnessError::UnknownGame(s.to_string())),
        }
    }
}

impl std::fmt::Display for GameKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthItem {
    pub template_name: String,
    pub block: NormalizedBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthText {
    pub text: String,
    pub block: NormalizedBlock,
}

/// A clickable thing on screen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub id: String,
    pub label: String,
    pub block: NormalizedBlock,
}

/// Ground truth for the frame rendered at `t_ms`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneTruth {
    pub t_ms: u64,
    pub scene: String,
    pub state_id: String,
    pub items: Vec<TruthItem>,
    pub texts: Vec<TruthText>,
    pub targets: Vec<Target>,
}

impl SceneTruth {
    pub fn target(&self, id: &str) -> Option<&Target> {
        self.targets.iter().find(|t| t.id == id)
    }
}

/// A deterministic game: named scenes, a renderer and a truth ledger.
pub trait SimGame: Send {
    fn kind(&self) -> GameKind;

    fn size(&self) -> (u32, u32);

    /// Configuration bundle authored for this game at its current scale.
    fn bundle(&self) -> GameConfig;

    fn scenes(&self) -> Vec<String>;

    fn scene(&self) -> String;

    fn set_scene(&mut self, name: &str) -> Result<(), HarnessError>;

    fn truth(&self, t_ms: u64) -> SceneTruth;

    fn render(&self, t_ms: u64) -> Frame;

    /// Reaction to a click on target `id` (a scene change, a card played ...).
    fn on_target(&mut self, id: &str);

    /// Default scene timeline for unattended runs: `(t_ms, scene)` pairs.
    fn demo_script(&self) -> Vec<(u64, String)>;
}

/// One click delivered to the simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub t_ms: u64,
    pub x: u32,
    pub y: u32,
    /// Target whose true rect contained the point at click time.
    pub target: Option<String>,
}

/// A game plus its clock, scripted scene changes and hit ledger.
pub struct SimWorld {
    game: Box<dyn SimGame>,
    now: u64,
    script: VecDeque<(u64, String)>,
    hits: Vec<Hit>,
    frozen: bool,
    lag_ms: u64,
}

impl SimWorld {
    pub fn new(game: Box<dyn SimGame>) -> Self {
        SimWorld { game, now: 0, script: VecDeque::new(), hits: Vec::new(), frozen: false, lag_ms: 0 }
    }

    /// Scene changes applied when the clock passes each time.
    pub fn with_script(mut self, mut script: Vec<(u64, String)>) -> Self {
        script.sort_by_key(|(t, _)| *t);
        self.script = script.into();
        self
    }

    /// Clicks are recorded but never change the scene.
    pub fn frozen(mut self) -> Self {
        self.frozen = true;
        self
    }

    /// Delay between an action being issued and reaching the game, standing
    /// in for detection latency.
    pub fn with_click_lag(mut self, ms: u64) -> Self {
        self.lag_ms = ms;
        self
    }

    pub fn shared(self) -> SharedWorld {
        SharedWorld(Arc::new(Mutex::new(self)))
    }

    pub fn game(&self) -> &dyn SimGame {
        self.game.as_ref()
    }

    pub fn game_mut(&mut self) -> &mut dyn SimGame {
        self.game.as_mut()
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn advance_to(&mut self, t_ms: u64) {
        while let Some((t, _)) = self.script.front() {
            if *t > t_ms {
                break;
            }
            let (_, scene) = self.script.pop_front().expect("front exists");
            if let Err(e) = self.game.set_scene(&scene) {
                tracing::warn!("script: {e}");
            }
        }
        self.now = self.now.max(t_ms);
    }

    pub fn frame(&self) -> Frame {
        self.game.render(self.now).with_timestamp(self.now)
    }

    pub fn truth(&self) -> SceneTruth {
        self.game.truth(self.now)
    }

    pub fn click(&mut self, x: u32, y: u32) -> Option<String> {
        let t = self.now + self.lag_ms;
        self.advance_to(t);
        let (w, h) = self.game.size();
        let truth = self.game.truth(t);
        let target = truth
            .targets
            .iter()
            .rev()
            .find(|tg| denormalize(&tg.block, w, h).contains(x, y))
            .map(|tg| tg.id.clone());
        self.hits.push(Hit { t_ms: t, x, y, target: target.clone() });
        if let (Some(id), false) = (&target, self.frozen) {
            self.game.on_target(id);
        }
        target
    }

    pub fn hits(&self) -> &[Hit] {
        &self.hits
    }
}

/// Thread-safe handle shared by the frame source and the output backend.
#[derive(Clone)]
pub struct SharedWorld(Arc<Mutex<SimWorld>>);

impl SharedWorld {
    pub fn lock(&self) -> MutexGuard<'_, SimWorld> {
        self.0.lock().unwrap_or_else(|p| p.into_inner())
    }

    pub fn backend(&self) -> SimBackend {
        SimBackend(self.clone())
    }

    /// Frames every `step_ms`, `count` of them (unbounded when `None`).
    pub fn source(&self, step_ms: u64, count: Option<usize>) -> SimSource {
        SimSource { world: self.clone(), step_ms: step_ms.max(1), remaining: count, next_t: 0 }
    }
}

pub struct SimSource {
    world: SharedWorld,
    step_ms: u64,
    remaining: Option<usize>,
    next_t: u64,
}

impl FrameSource for SimSource {
    fn kind(&self) -> SourceKind {
        SourceKind::Simulator
    }

    fn nominal_rate(&self) -> f64 {
        1000.0 / self.step_ms as f64
    }

    fn next_frame(&mut self) -> Result<Option<Frame>, FrameError> {
        if self.remaining == Some(0) {
            return Ok(None);
        }
        if let Some(r) = &mut self.remaining {
            *r -= 1;
        }
        let mut world = self.world.lock();
        // The clock may have been pushed forward by a lagged click.
        let t = self.next_t.max(world.now() + u64::from(self.next_t > 0));
        world.advance_to(t);
        self.next_t = t + self.step_ms;
        Ok(Some(world.frame()))
    }
}

/// Output backend that delivers clicks into the simulator's hit ledger.
#[derive(Clone)]
pub struct SimBackend(SharedWorld);

impl OutputBackend for SimBackend {
    fn click(&self, x: u32, y: u32) -> Result<(), BackendError> {
        self.0.lock().click(x, y);
        Ok(())
    }

    fn key(&self, _sequence: &str) -> Result<(), BackendError> {
        Ok(())
    }
}
