use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Chord, NormalizedBlock};
use crate::frames::Frame;

/// Reserved state id used when no cue is recognized.
pub const UNKNOWN_STATE: &str = "unknown";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Parser,
    #[default]
    Manual,
    Ocr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub block: NormalizedBlock,
    #[serde(default)]
    pub content: String,
    #[serde(default)]
    pub interactivity: bool,
    #[serde(default)]
    pub provenance: Provenance,
}

impl Element {
    pub fn new(block: NormalizedBlock, content: impl Into<String>, interactivity: bool) -> Self {
        Element { block, content: content.into(), interactivity, provenance: Provenance::Manual }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementMap {
    pub state_id: String,
    #[serde(default)]
    pub elements: Vec<Element>,
}

impl ElementMap {
    pub fn new(state_id: impl Into<String>, elements: Vec<Element>) -> Self {
        ElementMap { state_id: state_id.into(), elements }
    }

    pub fn interactive(&self) -> impl Iterator<Item = &Element> {
        self.elements.iter().filter(|e| e.interactivity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Critical,
    #[default]
    Normal,
}

/// Exemplar image plus reminder text identifying a game state or event.
#[derive(Debug, Clone, PartialEq)]
pub struct VisualCue {
    pub event_id: String,
    pub image: Frame,
    pub region: NormalizedBlock,
    /// Message per language tag.
    pub message: BTreeMap<String, String>,
    pub severity: Severity,
}

impl VisualCue {
    pub fn message_in(&self, language: &str, default_language: &str) -> Option<&str> {
        self.message
            .get(language)
            .or_else(|| self.message.get(default_language))
            .or_else(|| self.message.values().next())
            .map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HotkeyKind {
    DescribeRegion,
    ClickBlock,
    StateQuery,
    ReplayLast,
    PauseResume,
}

impl HotkeyKind {
    pub fn requires_block(self) -> bool {
        matches!(self, HotkeyKind::DescribeRegion | HotkeyKind::ClickBlock)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HotkeyOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<NormalizedBlock>,
    /// Prompt key for `describe_region`, label key for `state_query`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt: Option<String>,
    /// Fact looked up by `state_query`; defaults to the binding id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fact: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HotkeyBinding {
    pub key: Chord,
    pub id: String,
    pub kind: HotkeyKind,
    #[serde(default)]
    pub options: HotkeyOptions,
    /// Empty means "all states".
    #[serde(default)]
    pub active_states: Vec<String>,
}

impl HotkeyBinding {
    pub fn active_in(&self, state: &str) -> bool {
        self.active_states.is_empty() || self.active_states.iter().any(|s| s == state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlayerMode {
    Blind,
    LowVision,
}

impl PlayerMode {
    pub fn file_name(self) -> &'static str {
        match self {
            PlayerMode::Blind => "profile_blind.json",
            PlayerMode::LowVision => "profile_low_vision.json",
        }
    }
}

impl std::str::FromStr for PlayerMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "blind" => Ok(PlayerMode::Blind),
            "low_vision" => Ok(PlayerMode::LowVision),
            other => Err(format!("unknown profile {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputVariant {
    #[serde(rename = "keyboard")]
    Keyboard,
    #[serde(rename = "mouse+keyboard")]
    MouseKeyboard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verbosity {
    Brief,
    Rich,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub mode: PlayerMode,
    pub input: InputVariant,
    pub verbosity: Verbosity,
    #[serde(default)]
    pub ocr_hover_enabled: bool,
}

impl Profile {
    pub fn blind() -> Self {
        Profile { mode: PlayerMode::Blind, input: InputVariant::Keyboard, verbosity: Verbosity::Brief, ocr_hover_enabled: false }
    }

    pub fn low_vision() -> Self {
        Profile {
            mode: PlayerMode::LowVision,
            input: InputVariant::MouseKeyboard,
            verbosity: Verbosity::Brief,
            ocr_hover_enabled: true,
        }
    }

    pub fn for_mode(mode: PlayerMode) -> Self {
        match mode {
            PlayerMode::Blind => Self::blind(),
            PlayerMode::LowVision => Self::low_vision(),
        }
    }

    pub fn is_consistent(&self) -> bool {
        match self.mode {
            PlayerMode::Blind => self.input == InputVariant::Keyboard && !self.ocr_hover_enabled,
            PlayerMode::LowVision => true,
        }
    }

    pub fn mouse_enabled(&self) -> bool {
        self.input == InputVariant::MouseKeyboard
    }
}

/// Named region whose change and text are monitored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorBlock {
    pub id: String,
    pub block: NormalizedBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "ChangeConfigRaw")]
pub struct ChangeConfig {
    pub enabled: bool,
    pub threshold1: f64,
    pub threshold2: f64,
    pub blocks: Vec<MonitorBlock>,
}

impl Default for ChangeConfig {
    fn default() -> Self {
        ChangeConfig { enabled: true, threshold1: 0.3, threshold2: 0.7, blocks: Vec::new() }
    }
}

impl ChangeConfig {
    pub fn thresholds_valid(&self) -> bool {
        (0.0..=1.0).contains(&self.threshold1)
            && (0.0..=1.0).contains(&self.threshold2)
            && self.threshold1 <= self.threshold2
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MonitorBlockRaw {
    Bare(NormalizedBlock),
    Named { id: String, block: NormalizedBlock },
}

#[derive(Deserialize)]
struct ChangeConfigRaw {
    #[serde(default = "yes")]
    enabled: bool,
    #[serde(default = "theta1")]
    threshold1: f64,
    #[serde(default = "theta2")]
    threshold2: f64,
    #[serde(default)]
    blocks: Vec<MonitorBlockRaw>,
}

fn yes() -> bool {
    true
}
fn theta1() -> f64 {
    0.3
}
fn theta2() -> f64 {
    0.7
}

impl From<ChangeConfigRaw> for ChangeConfig {
    fn from(raw: ChangeConfigRaw) -> Self {
        let blocks = raw
            .blocks
            .into_iter()
            .enumerate()
            .map(|(i, b)| match b {
                MonitorBlockRaw::Bare(block) => MonitorBlock { id: format!("block{i}"), block },
                MonitorBlockRaw::Named { id, block } => MonitorBlock { id, block },
            })
            .collect();
        ChangeConfig { enabled: raw.enabled, threshold1: raw.threshold1, threshold2: raw.threshold2, blocks }
    }
}

/// Detect-agent tunables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectConfig {
    /// Minimum cue score for a state to be recognized.
    pub accept: f64,
    /// Template-match threshold (tau).
    pub match_threshold: f64,
    pub debounce_n: u32,
    pub nms_iou: f64,
    /// Region searched for items; whole frame when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub item_search: Option<NormalizedBlock>,
    /// Grid step used to key items by position in the debouncer.
    pub item_quantum: f64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            accept: 0.60,
            match_threshold: 0.85,
            debounce_n: 2,
            nms_iou: 0.3,
            item_search: None,
            item_quantum: 0.025,
        }
    }
}

/// Spatial-audio shaping constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpatialConfig {
    pub pan_exponent: f64,
    pub max_pitch_semitones: f64,
    pub max_delay_ms: f64,
}

impl Default for SpatialConfig {
    fn default() -> Self {
        SpatialConfig { pan_exponent: 0.6, max_pitch_semitones: 4.0, max_delay_ms: 30.0 }
    }
}

/// A loaded, validated game bundle. Immutable once loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct GameConfig {
    pub game_id: String,
    pub default_language: String,
    pub cues: Vec<VisualCue>,
    pub templates: BTreeMap<String, Frame>,
    pub element_maps: BTreeMap<String, ElementMap>,
    pub hotkeys: Vec<HotkeyBinding>,
    pub prompts: BTreeMap<String, String>,
    /// label key -> language tag -> text
    pub labels: BTreeMap<String, BTreeMap<String, String>>,
    pub profiles: Vec<Profile>,
    pub change: ChangeConfig,
    pub detect: DetectConfig,
    pub spatial: SpatialConfig,
}

impl GameConfig {
    /// A bundle with no game-specific assets, as used by general mode.
    pub fn empty(game_id: impl Into<String>) -> Self {
        GameConfig {
            game_id: game_id.into(),
            default_language: "en".into(),
            cues: Vec::new(),
            templates: BTreeMap::new(),
            element_maps: BTreeMap::new(),
            hotkeys: Vec::new(),
            prompts: BTreeMap::new(),
            labels: BTreeMap::new(),
            profiles: Vec::new(),
            change: ChangeConfig::default(),
            detect: DetectConfig::default(),
            spatial: SpatialConfig::default(),
        }
    }

    pub fn cue(&self, event_id: &str) -> Option<&VisualCue> {
        self.cues.iter().find(|c| c.event_id == event_id)
    }

    pub fn is_declared_state(&self, state: &str) -> bool {
        state == UNKNOWN_STATE || self.cues.iter().any(|c| c.event_id == state)
    }

    pub fn profile(&self, mode: PlayerMode) -> Profile {
        self.profiles.iter().copied().find(|p| p.mode == mode).unwrap_or_else(|| Profile::for_mode(mode))
    }

    pub fn set_label(&mut self, key: impl Into<String>, language: impl Into<String>, text: impl Into<String>) {
        self.labels.entry(key.into()).or_default().insert(language.into(), text.into());
    }
}
