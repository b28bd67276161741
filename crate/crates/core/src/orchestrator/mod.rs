//! Session orchestration: the detect loop, event routing to describe and
//! act, state transitions, operating modes and the game adapter.

mod adapter;
mod log;
mod session;

pub use adapter::{adapt_game, AdapterError, ConfigFragment, ADAPTER_PROMPT};
pub use log::{LogEntry, LogRecord, SessionLog};
pub use session::{general_config, run_session, Session, SessionOptions, SessionState};

use serde::{Deserialize, Serialize};

use crate::config::ConfigError;
use crate::frames::FrameError;

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Source(#[from] FrameError),
    #[error("session log {path}: {source}")]
    Log {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Operating modes, from a screen reader with OCR up to the full framework.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    BaselineOcr,
    General,
    AutoAdaptive,
    Full,
}

impl Mode {
    pub const LADDER: [Mode; 4] = [Mode::BaselineOcr, Mode::General, Mode::AutoAdaptive, Mode::Full];

    pub fn name(self) -> &'static str {
        match self {
            Mode::BaselineOcr => "baseline_ocr",
            Mode::General => "general",
            Mode::AutoAdaptive => "auto_adaptive",
            Mode::Full => "full",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::LADDER.into_iter().find(|m| m.name() == s).ok_or_else(|| format!("unknown mode {s:?}"))
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// What a session may do in a given mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Capabilities {
    /// Read on-screen text with OCR and navigate it as a list.
    pub ocr_text: bool,
    pub hover: bool,
    pub change_routing: bool,
    pub vlm_descriptions: bool,
    pub questions: bool,
    pub adapter: bool,
    pub cues: bool,
    pub templates: bool,
    /// Navigation grids from annotated element maps.
    pub grids: bool,
    pub hotkeys: bool,
    pub clicks: bool,
}

impl Capabilities {
    pub fn of(mode: Mode) -> Self {
        let rank = Mode::LADDER.iter().position(|m| *m == mode).expect("mode on ladder");
        let at = |min: usize| rank >= min;
        Capabilities {
            ocr_text: true,
            hover: true,
            change_routing: at(1),
            vlm_descriptions: at(1),
            questions: at(1),
            adapter: at(2),
            cues: at(3),
            templates: at(3),
            grids: at(3),
            hotkeys: at(3),
            clicks: at(3),
        }
    }

    pub fn flags(&self) -> [bool; 11] {
        [
            self.ocr_text,
            self.hover,
            self.change_routing,
            self.vlm_descriptions,
            self.questions,
            self.adapter,
            self.cues,
            self.templates,
            self.grids,
            self.hotkeys,
            self.clicks,
        ]
    }

    pub fn is_subset_of(&self, other: &Capabilities) -> bool {
        self.flags().iter().zip(other.flags()).all(|(a, b)| !a || b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_is_monotone() {
        for w in Mode::LADDER.windows(2) {
            let (lo, hi) = (Capabilities::of(w[0]), Capabilities::of(w[1]));
            assert!(lo.is_subset_of(&hi), "{} vs {}", w[0], w[1]);
            assert_ne!(lo, hi);
        }
    }

    #[test]
    fn baseline_has_no_vlm_and_full_has_everything() {
        let b = Capabilities::of(Mode::BaselineOcr);
        assert!(!b.vlm_descriptions && !b.questions && !b.grids && !b.clicks);
        assert!(Capabilities::of(Mode::Full).flags().iter().all(|f| *f));
    }

    #[test]
    fn mode_names_round_trip() {
        for m in Mode::LADDER {
            assert_eq!(m.name().parse::<Mode>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.name()));
        }
    }
}
