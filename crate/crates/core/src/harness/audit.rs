//! Navigation and action audits: a session drives a simulated scene through
//! the keyboard and the simulator's ground truth scores the outcome.

use std::sync::Arc;

use serde::Serialize;

use super::metrics::{Metrics, Ratio};
use super::world::{GameKind, SharedWorld, SimWorld, Target};
use super::{make_game, HarnessError};
use crate::act::NavCursor;
use crate::clients::{Clients, RecordingTts, ServiceKind};
use crate::config::{Element, Profile};
use crate::exec::Execution;
use crate::frames::InputEvent;
use crate::orchestrator::{Mode, Session, SessionOptions};

#[derive(Debug, Clone)]
pub struct AuditOptions {
    pub mode: Mode,
    pub seed: u64,
    pub scale: u32,
    pub exec: Execution,
    pub profile: Profile,
    pub step_ms: u64,
    /// Frames shown before the audit starts, enough to confirm the state.
    pub settle_frames: usize,
    /// Delay before a click reaches the game.
    pub click_lag_ms: u64,
}

impl AuditOptions {
    pub fn new(mode: Mode) -> Self {
        AuditOptions {
            mode,
            seed: 1,
            scale: 1,
            exec: Execution::default(),
            profile: Profile::blind(),
            step_ms: 100,
            settle_frames: 3,
            click_lag_ms: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_lag(mut self, ms: u64) -> Self {
        self.click_lag_ms = ms;
        self
    }
}

/// A session wired to a simulated world, with its own input clock.
pub(crate) struct Rig {
    pub world: SharedWorld,
    pub session: Session,
    pub t: u64,
    step_ms: u64,
}

impl Rig {
    pub fn start(game: GameKind, scene: Option<&str>, opts: &AuditOptions, frozen: bool) -> Result<Rig, HarnessError> {
        let mut g = make_game(game, opts.seed, opts.scale);
        if let Some(scene) = scene {
            g.set_scene(scene)?;
        }
        let bundle = g.bundle();
        let mut world = SimWorld::new(g).with_click_lag(opts.click_lag_ms);
        if frozen {
            world = world.frozen();
        }
        let world = world.shared();
        let session_opts = SessionOptions::new(opts.mode).with_profile(opts.profile).with_exec(opts.exec);
        let session = Session::new(
            &bundle,
            session_opts,
            Clients::mock(),
            Arc::new(RecordingTts::new()),
            Arc::new(world.backend()),
        )?;
        let mut rig = Rig { world, session, t: 0, step_ms: opts.step_ms.max(2) };
        rig.frame_at(0);
        rig.settle(opts.settle_frames.saturating_sub(1));
        Ok(rig)
    }

    fn frame_at(&mut self, t: u64) {
        let frame = {
            let mut w = self.world.lock();
            w.advance_to(t);
            w.frame()
        };
        self.t = frame.timestamp_ms;
        self.session.on_frame(frame);
    }

    pub fn settle(&mut self, frames: usize) {
        for _ in 0..frames {
            let next = self.t.max(self.world.lock().now()) + self.step_ms;
            self.frame_at(next);
        }
    }

    pub fn input(&mut self, event: InputEvent) {
        self.t += 1;
        self.session.on_input(&InputEvent { t_ms: self.t, ..event });
    }

    pub fn key(&mut self, key: &str) {
        self.input(InputEvent::key(0, key));
    }

    pub fn element_at(&self, c: NavCursor) -> Option<Element> {
        self.session.grid().and_then(|g| g.get(c.r, c.c)).cloned()
    }

    pub fn targets(&self) -> Vec<Target> {
        self.world.lock().truth().targets
    }

    /// Grid cell whose element centre lies inside `target`.
    pub fn cell_for(&self, target: &Target) -> Option<NavCursor> {
        let grid = self.session.grid()?;
        grid.rows.iter().enumerate().find_map(|(r, row)| {
            row.iter().position(|e| {
                let (x, y) = e.block.center();
                target.block.contains(x, y)
            })
            .map(|c| NavCursor { r: r + 1, c: c + 1 })
        })
    }

    /// Arrow keys toward `goal`; true when the cursor ends there.
    pub fn navigate_to(&mut self, goal: NavCursor) -> bool {
        let limit = 4 * self.session.grid().map_or(0, |g| g.cell_count()) + 4;
        for _ in 0..limit {
            let c = self.session.cursor();
            let key = if c.r < goal.r {
                "down"
            } else if c.r > goal.r {
                "up"
            } else if c.c < goal.c {
                "right"
            } else if c.c > goal.c {
                "left"
            } else {
                return true;
            };
            self.key(key);
            if self.session.cursor() == c {
                return false;
            }
        }
        self.session.cursor() == goal
    }

    pub fn vlm_calls(&self) -> u64 {
        self.session.clients().ledger.usage(ServiceKind::Vlm).calls
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NavigationAudit {
    pub game: GameKind,
    pub scene: String,
    pub mode: Mode,
    /// Contents of the distinct elements the cursor visited, in order.
    pub visited: Vec<String>,
    /// Ground-truth targets a visited element landed on.
    pub reached: Vec<String>,
    pub missed: Vec<String>,
    pub metrics: Metrics,
    /// Set when the scene has nothing to navigate.
    pub notice: Option<String>,
    pub vlm_calls: u64,
}

/// Walks the grid row by row (left edge, right edge, down) and checks which
/// ground-truth targets the visited elements cover.
pub fn run_navigation_audit(game: GameKind, scene: &str, opts: &AuditOptions) -> Result<NavigationAudit, HarnessError> {
    let mut rig = Rig::start(game, Some(scene), opts, true)?;
    let targets = rig.targets();
    let mut visited: Vec<Element> = Vec::new();
    let visit = |rig: &Rig, visited: &mut Vec<Element>| {
        if let Some(e) = rig.element_at(rig.session.cursor()) {
            if !visited.contains(&e) {
                visited.push(e);
            }
        }
    };
    visit(&rig, &mut visited);
    loop {
        for dir in ["left", "right"] {
            loop {
                let before = rig.session.cursor();
                rig.key(dir);
                if rig.session.cursor() == before {
                    break;
                }
                visit(&rig, &mut visited);
            }
        }
        let before = rig.session.cursor();
        rig.key("down");
        if rig.session.cursor() == before {
            break;
        }
        visit(&rig, &mut visited);
    }
    let (reached, missed): (Vec<&Target>, Vec<&Target>) = targets.iter().partition(|t| {
        visited.iter().any(|e| {
            let (x, y) = e.block.center();
            t.block.contains(x, y)
        })
    });
    let mut audit = NavigationAudit {
        game,
        scene: scene.into(),
        mode: opts.mode,
        visited: visited.iter().map(|e| e.content.clone()).collect(),
        reached: reached.iter().map(|t| t.id.clone()).collect(),
        missed: missed.iter().map(|t| t.id.clone()).collect(),
        metrics: Metrics::default(),
        notice: None,
        vlm_calls: rig.vlm_calls(),
    };
    if targets.is_empty() {
        audit.notice = Some(format!("scene {scene:?} is display-only; navigation audit skipped"));
    } else {
        audit.metrics.coverage = Some(Ratio::new(reached.len(), targets.len(), "scene has no targets")?);
    }
    Ok(audit)
}

#[derive(Debug, Clone, Serialize)]
pub struct Attempt {
    pub target: String,
    /// The cursor reached a cell over the target.
    pub reached: bool,
    pub point: Option<(u32, u32)>,
    /// What the simulator says was under the click.
    pub hit: Option<String>,
    pub success: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ActionAudit {
    pub game: GameKind,
    pub scene: String,
    pub mode: Mode,
    pub attempts: Vec<Attempt>,
    pub metrics: Metrics,
}

/// Navigates to each target in turn and presses Enter. Success means the
/// simulator's hit ledger puts the click inside that target's true rect.
/// Clicks do not change the scene.
pub fn run_action_audit(
    game: GameKind,
    scene: &str,
    targets: &[String],
    opts: &AuditOptions,
) -> Result<ActionAudit, HarnessError> {
    if targets.is_empty() {
        return Err(HarnessError::EmptyDenominator("action script is empty"));
    }
    let mut rig = Rig::start(game, Some(scene), opts, true)?;
    let mut attempts = Vec::with_capacity(targets.len());
    for id in targets {
        rig.settle(1);
        attempts.push(attempt(&mut rig, id)?);
    }
    let hits = attempts.iter().filter(|a| a.success).count();
    let metrics = Metrics { action: Some(Ratio::new(hits, attempts.len(), "action script is empty")?), ..Metrics::default() };
    Ok(ActionAudit { game, scene: scene.into(), mode: opts.mode, attempts, metrics })
}

pub(crate) fn attempt(rig: &mut Rig, id: &str) -> Result<Attempt, HarnessError> {
    let target = rig.targets().into_iter().find(|t| t.id == id).ok_or_else(|| HarnessError::UnknownTarget(id.into()))?;
    let reached = match rig.cell_for(&target) {
        Some(goal) => rig.navigate_to(goal),
        None => false,
    };
    let before = rig.world.lock().hits().len();
    if reached {
        rig.key("enter");
    }
    let hit = rig.world.lock().hits().get(before..).and_then(|h| h.last().cloned());
    Ok(Attempt {
        target: id.into(),
        reached,
        point: hit.as_ref().map(|h| (h.x, h.y)),
        success: hit.as_ref().is_some_and(|h| h.target.as_deref() == Some(id)),
        hit: hit.and_then(|h| h.target),
    })
}
