//! Scripted user intents run end to end against a simulated game.
//!
//! ```json
//! {"game": "card", "seed": 3, "mode": "full",
//!  "steps": [{"kind": "activate", "target": "local_mode"},
//!            {"kind": "key", "key": "<alt>+d", "expect": "Last discard"}]}
//! ```

use std::fmt::Write as _;
use std::path::Path;

use base64::Engine;
use serde::{Deserialize, Serialize};

use super::audit::{attempt, AuditOptions, Rig};
use super::metrics::{Metrics, Ratio};
use super::world::GameKind;
use super::HarnessError;
use crate::describe::Origin;
use crate::frames::{InputEvent, InputKind};
use crate::orchestrator::{LogEntry, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// Arrow keys to the target's grid cell.
    Navigate,
    /// Navigate, then Enter; the click must land on the target.
    Activate,
    /// Press a key or chord; it must produce speech or an action.
    Key,
    /// Speak a question; it must be answered.
    Ask,
    /// Let `frames` frames pass.
    Wait,
    /// The session must be in state `state`.
    ExpectState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step {
    pub kind: StepKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utterance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frames: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    /// Text the step's speech must contain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub game: GameKind,
    #[serde(default)]
    pub seed: u64,
    pub mode: Mode,
    /// Starting scene; the game's own start screen when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub click_lag_ms: Option<u64>,
    pub steps: Vec<Step>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let scenario: Scenario =
            serde_json::from_str(&text).map_err(|e| HarnessError::BadScenario(format!("{}: {e}", path.display())))?;
        scenario.check()?;
        Ok(scenario)
    }

    fn check(&self) -> Result<(), HarnessError> {
        for (i, s) in self.steps.iter().enumerate() {
            let missing = match s.kind {
                StepKind::Navigate | StepKind::Activate => s.target.is_none().then_some("target"),
                StepKind::Key => s.key.is_none().then_some("key"),
                StepKind::Ask => s.utterance.is_none().then_some("utterance"),
                StepKind::ExpectState => s.state.is_none().then_some("state"),
                StepKind::Wait => None,
            };
            if let Some(field) = missing {
                return Err(HarnessError::BadScenario(format!("step {i} ({:?}) needs {field:?}", s.kind)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepResult {
    pub index: usize,
    pub kind: StepKind,
    pub ok: bool,
    pub detail: String,
    pub speech: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub game: GameKind,
    pub mode: Mode,
    pub seed: u64,
    pub steps: Vec<StepResult>,
    /// Completed intents over all non-wait steps.
    pub intents: Option<Ratio>,
    pub metrics: Metrics,
    pub vlm_calls: u64,
}

impl ScenarioReport {
    pub fn all_ok(&self) -> bool {
        self.steps.iter().all(|s| s.ok)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn table(&self) -> String {
        let mut out = format!("scenario {} ({}, seed {})\n", self.game, self.mode, self.seed);
        for s in &self.steps {
            let _ = writeln!(out, "{:>3} {:<12} {:<4} {}", s.index, format!("{:?}", s.kind), if s.ok { "ok" } else { "FAIL" }, s.detail);
        }
        if let Some(r) = self.intents {
            let _ = writeln!(out, "intents          {r}");
        }
        out.push_str(&self.metrics.table());
        out
    }
}

/// Runs every step in order; later steps run even when earlier ones fail.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioReport, HarnessError> {
    scenario.check()?;
    let mut opts = AuditOptions::new(scenario.mode).with_seed(scenario.seed);
    opts.click_lag_ms = scenario.click_lag_ms.unwrap_or(0);
    let mut rig = Rig::start(scenario.game, scenario.scene.as_deref(), &opts, false)?;
    let settle = opts.settle_frames;
    let mut results = Vec::new();
    let (mut clicks, mut landed) = (0, 0);
    for (index, step) in scenario.steps.iter().enumerate() {
        let mark = rig.session.log().len();
        let (mut ok, detail) = match step.kind {
            StepKind::Navigate => {
                let id = step.target.as_deref().expect("checked");
                let target = rig.targets().into_iter().find(|t| t.id == id);
                match target.and_then(|t| rig.cell_for(&t)) {
                    Some(goal) => {
                        let ok = rig.navigate_to(goal);
                        (ok, format!("cursor at row {} column {}", rig.session.cursor().r, rig.session.cursor().c))
                    }
                    None => (false, format!("{id} is not in the navigation grid")),
                }
            }
            StepKind::Activate => {
                let id = step.target.as_deref().expect("checked");
                let a = match attempt(&mut rig, id) {
                    Ok(a) => a,
                    Err(HarnessError::UnknownTarget(t)) => {
                        results.push(StepResult { index, kind: step.kind, ok: false, detail: format!("no target {t:?} on screen"), speech: vec![] });
                        clicks += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                clicks += 1;
                landed += usize::from(a.success);
                rig.settle(settle);
                (a.success, format!("click at {:?} hit {:?}", a.point, a.hit))
            }
            StepKind::Key => {
                rig.key(step.key.as_deref().expect("checked"));
                let effect = rig.session.log().records()[mark..].iter().any(|r| {
                    matches!(r.entry, LogEntry::Speech { .. } | LogEntry::Action { .. } | LogEntry::Queue { .. })
                });
                (effect, if effect { "handled".into() } else { "no effect".into() })
            }
            StepKind::Ask => {
                let audio = step.utterance.as_deref().expect("checked").as_bytes();
                let audio_b64 = base64::engine::general_purpose::STANDARD.encode(audio);
                rig.input(InputEvent { t_ms: 0, kind: InputKind::Voice { audio_b64 } });
                let answered = rig.session.log().records()[mark..]
                    .iter()
                    .any(|r| matches!(r.entry, LogEntry::Speech { origin: Origin::Answer, .. }));
                (answered, if answered { "answered".into() } else { "unanswered".into() })
            }
            StepKind::Wait => {
                rig.settle(step.frames.unwrap_or(settle));
                (true, format!("state {}", rig.session.state().state_id))
            }
            StepKind::ExpectState => {
                let want = step.state.as_deref().expect("checked");
                let got = rig.session.state().state_id.clone();
                (got == want, format!("state {got}"))
            }
        };
        let speech: Vec<String> = rig.session.log().records()[mark..]
            .iter()
            .filter_map(|r| match &r.entry {
                LogEntry::Speech { text, .. } => Some(text.clone()),
                _ => None,
            })
            .collect();
        if let Some(want) = &step.expect {
            ok &= speech.iter().any(|s| s.contains(want.as_str()));
        }
        results.push(StepResult { index, kind: step.kind, ok, detail, speech });
    }
    let intents: Vec<&StepResult> = results.iter().filter(|r| r.kind != StepKind::Wait).collect();
    let intents = if intents.is_empty() {
        None
    } else {
        Some(Ratio::new(intents.iter().filter(|r| r.ok).count(), intents.len(), "no intents")?)
    };
    let metrics = Metrics {
        action: if clicks > 0 { Some(Ratio::new(landed, clicks, "no activations")?) } else { None },
        ..Metrics::default()
    };
    Ok(ScenarioReport {
        game: scenario.game,
        mode: scenario.mode,
        seed: scenario.seed,
        steps: results,
        intents,
        metrics,
        vlm_calls: rig.vlm_calls(),
    })
}
