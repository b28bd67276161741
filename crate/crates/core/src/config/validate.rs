use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use super::{GameConfig, UNKNOWN_STATE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingSeverity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "code", content = "subject", rename_all = "snake_case")]
pub enum FindingCode {
    MissingFile(String),
    SchemaViolation,
    BadBlock,
    DanglingStateRef(String),
    DuplicateElement,
    DuplicateEventId(String),
    MissingCueMessage(String),
    NoCues,
    BlockRequired(String),
    UnknownPrompt(String),
    AmbiguousBinding(String),
    BadThresholds,
    InconsistentProfile,
    EmptyInteractiveContent,
    MapStateMismatch(String),
}

/// One validation result. `location` is `<file>#<json pointer>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub severity: FindingSeverity,
    #[serde(flatten)]
    pub code: FindingCode,
    pub location: String,
    pub message: String,
}

impl Finding {
    pub fn error(code: FindingCode, location: impl Into<String>, message: impl Into<String>) -> Self {
        Finding { severity: FindingSeverity::Error, code, location: location.into(), message: message.into() }
    }

    pub fn warning(code: FindingCode, location: impl Into<String>, message: impl Into<String>) -> Self {
        Finding { severity: FindingSeverity::Warning, code, location: location.into(), message: message.into() }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            FindingSeverity::Error => "error",
            FindingSeverity::Warning => "warning",
        };
        write!(f, "{sev}: {} ({})", self.message, self.location)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn push(&mut self, finding: Finding) {
        self.findings.push(finding);
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == FindingSeverity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == FindingSeverity::Warning)
    }

    pub fn error_count(&self) -> usize {
        self.errors().count()
    }

    pub fn is_ok(&self) -> bool {
        self.error_count() == 0
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.findings.extend(other.findings);
    }
}

/// Checks the referential and structural invariants of a bundle. Pure.
pub fn validate_config(config: &GameConfig) -> ValidationReport {
    let mut report = ValidationReport::default();

    if config.cues.is_empty() {
        report.push(Finding::warning(
            FindingCode::NoCues,
            "game.json#/cues",
            "bundle declares no visual cues; only general-mode features will be available",
        ));
    }

    let mut seen = HashSet::new();
    for (i, cue) in config.cues.iter().enumerate() {
        let loc = format!("game.json#/cues/{i}");
        if !seen.insert(cue.event_id.as_str()) {
            report.push(Finding::error(
                FindingCode::DuplicateEventId(cue.event_id.clone()),
                format!("{loc}/event_id"),
                format!("cue event_id {:?} is declared twice", cue.event_id),
            ));
        }
        if cue.event_id == UNKNOWN_STATE {
            report.push(Finding::error(
                FindingCode::SchemaViolation,
                format!("{loc}/event_id"),
                "\"unknown\" is reserved and cannot be a cue id",
            ));
        }
        if cue.message.values().all(|m| m.trim().is_empty()) {
            report.push(Finding::error(
                FindingCode::MissingCueMessage(cue.event_id.clone()),
                format!("cues/{}.txt", cue.event_id),
                format!("cue {:?} has an image but no message text", cue.event_id),
            ));
        }
    }

    if !config.change.thresholds_valid() {
        report.push(Finding::error(
            FindingCode::BadThresholds,
            "game.json#/change",
            format!(
                "thresholds must satisfy 0 <= threshold1 <= threshold2 <= 1 (got {} and {})",
                config.change.threshold1, config.change.threshold2
            ),
        ));
    }
    let d = &config.detect;
    if !(d.match_threshold > 0.0 && d.match_threshold <= 1.0) || !(-1.0..=1.0).contains(&d.accept) || d.debounce_n == 0 {
        report.push(Finding::error(
            FindingCode::SchemaViolation,
            "game.json#/detect",
            "detect config needs 0 < match_threshold <= 1, accept in [-1, 1] and debounce_n >= 1",
        ));
    }

    for (state, map) in &config.element_maps {
        let file = format!("maps/{state}.json");
        if map.state_id != *state {
            report.push(Finding::error(
                FindingCode::MapStateMismatch(map.state_id.clone()),
                format!("{file}#/state_id"),
                format!("map stored under {state:?} declares state_id {:?}", map.state_id),
            ));
        }
        if !config.is_declared_state(&map.state_id) {
            report.push(Finding::error(
                FindingCode::DanglingStateRef(map.state_id.clone()),
                format!("{file}#/state_id"),
                format!("element map refers to undeclared state {:?}", map.state_id),
            ));
        }
        for (i, el) in map.elements.iter().enumerate() {
            let dup = map.elements[..i].iter().position(|o| o.block == el.block && o.content == el.content);
            if let Some(j) = dup {
                report.push(Finding::error(
                    FindingCode::DuplicateElement,
                    format!("{file}#/elements/{i}"),
                    format!("element {i} duplicates element {j} ({:?} at {})", el.content, el.block),
                ));
            }
            if el.interactivity && el.content.trim().is_empty() {
                report.push(Finding::warning(
                    FindingCode::EmptyInteractiveContent,
                    format!("{file}#/elements/{i}/content"),
                    "interactive element has no label yet; it must be filled by OCR at runtime",
                ));
            }
        }
    }

    for (i, hk) in config.hotkeys.iter().enumerate() {
        let loc = format!("hotkeys.json#/{i}");
        for (j, s) in hk.active_states.iter().enumerate() {
            if !config.is_declared_state(s) {
                report.push(Finding::error(
                    FindingCode::DanglingStateRef(s.clone()),
                    format!("{loc}/active_states/{j}"),
                    format!("hotkey {:?} is active in undeclared state {s:?}", hk.id),
                ));
            }
        }
        if hk.kind.requires_block() && hk.options.block.is_none() {
            report.push(Finding::error(
                FindingCode::BlockRequired(hk.id.clone()),
                format!("{loc}/options/block"),
                format!("hotkey {:?} of this kind needs options.block", hk.id),
            ));
        }
        if hk.kind == super::HotkeyKind::DescribeRegion {
            if let Some(p) = &hk.options.prompt {
                if !config.prompts.contains_key(p) {
                    report.push(Finding::error(
                        FindingCode::UnknownPrompt(p.clone()),
                        format!("{loc}/options/prompt"),
                        format!("hotkey {:?} refers to missing prompt {p:?}", hk.id),
                    ));
                }
            }
        }
        for (j, other) in config.hotkeys[..i].iter().enumerate() {
            if other.key == hk.key && states_overlap(&other.active_states, &hk.active_states) {
                report.push(Finding::error(
                    FindingCode::AmbiguousBinding(hk.key.to_string()),
                    format!("{loc}/key"),
                    format!("chord {} is bound by hotkeys {j} and {i} in overlapping states", hk.key),
                ));
            }
        }
    }

    for (i, p) in config.profiles.iter().enumerate() {
        if !p.is_consistent() {
            report.push(Finding::error(
                FindingCode::InconsistentProfile,
                format!("{}#", p.mode.file_name()),
                format!("profile {i} is inconsistent: blind profiles must use keyboard input without OCR hover"),
            ));
        }
    }

    report
}

fn states_overlap(a: &[String], b: &[String]) -> bool {
    if a.is_empty() || b.is_empty() {
        return true;
    }
    let a: BTreeSet<&String> = a.iter().collect();
    b.iter().any(|s| a.contains(s))
}
