//! The game adapter: asks the VLM for a temporary configuration fragment
//! for a game without a bundle, and applies it only if it validates.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::clients::{ClientError, Clients};
use crate::config::{fill_template, parse_json_str, validate_config, GameConfig, HotkeyBinding};
use crate::frames::Frame;

pub const ADAPTER_PROMPT: &str = "You are configuring an accessibility layer for the game \"{title}\". \
Reply with JSON only: {\"prompts\": {\"describe_scene\": \"...\"}, \"labels\": {\"key\": \"text\"}}. \
The describe_scene prompt should tell a describer what matters on this game's screens.";

#[derive(Debug, thiserror::Error)]
pub enum AdapterError {
    #[error("adapter model unavailable: {0}")]
    ClientUnavailable(#[from] ClientError),
    #[error("invalid fragment at {location}: {message}")]
    InvalidFragment { location: String, message: String },
}

/// What a fragment may contribute.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFragment {
    #[serde(default)]
    pub prompts: BTreeMap<String, String>,
    /// Label key -> text in the session language.
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
    #[serde(default)]
    pub hotkeys: Vec<HotkeyBinding>,
}

/// The reply may wrap its JSON in a fenced code block.
fn json_body(reply: &str) -> &str {
    let t = reply.trim();
    let Some(rest) = t.strip_prefix("```") else { return t };
    let rest = rest.trim_start_matches(|c: char| c.is_ascii_alphabetic());
    rest.strip_suffix("```").unwrap_or(rest).trim()
}

/// Produces a temporary configuration: `base` plus the model's fragment.
pub fn adapt_game(frame: &Frame, window_title: &str, base: &GameConfig, clients: &Clients) -> Result<GameConfig, AdapterError> {
    let prompt = fill_template(ADAPTER_PROMPT, &[("title", window_title)]);
    let reply = clients.call_vlm(&frame.encode_png(), &prompt)?;
    let fragment: ConfigFragment = parse_json_str(json_body(&reply.text))
        .map_err(|(location, message)| AdapterError::InvalidFragment { location: format!("fragment#{location}"), message })?;
    let mut candidate = base.clone();
    candidate.prompts.extend(fragment.prompts);
    for (key, text) in fragment.labels {
        candidate.set_label(key, base.default_language.clone(), text);
    }
    candidate.hotkeys.extend(fragment.hotkeys);
    let report = validate_config(&candidate);
    if let Some(f) = report.errors().next() {
        return Err(AdapterError::InvalidFragment { location: f.location.clone(), message: f.message.clone() });
    }
    Ok(candidate)
}
