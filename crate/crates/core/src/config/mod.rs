//! The configuration bundle: visual cues, templates, element maps, hotkeys,
//! prompts, localized labels and tunables for every agent.

mod block;
mod chord;
mod load;
mod model;
mod validate;

use std::path::Path;

pub use block::{denormalize, BadBlock, NormalizedBlock, PixelRect};
pub use chord::{BadChord, Chord, Modifier};
pub use load::{inspect_bundle, load_game_config, load_profile, save_game_config};
pub(crate) use load::parse_json_str;
pub use model::*;
pub use validate::{validate_config, Finding, FindingCode, FindingSeverity, ValidationReport};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("missing file {path}")]
    MissingFile { path: String },
    #[error("schema violation at {location}: {message}")]
    SchemaViolation { location: String, message: String },
    #[error("reference to undeclared state {state:?} at {location}")]
    DanglingStateRef { state: String, location: String },
    #[error("bad block at {location}: {message}")]
    BadBlock { location: String, message: String },
    #[error("invalid bundle at {location}: {message}")]
    Invalid { location: String, message: String },
    #[error("unknown label key {0:?}")]
    UnknownLabelKey(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ConfigError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        ConfigError::Io { path: path.display().to_string(), source }
    }

    pub(crate) fn from_finding(f: &Finding) -> Self {
        let location = f.location.clone();
        let message = f.message.clone();
        match &f.code {
            FindingCode::MissingFile(path) => ConfigError::MissingFile { path: path.clone() },
            FindingCode::SchemaViolation => ConfigError::SchemaViolation { location, message },
            FindingCode::BadBlock => ConfigError::BadBlock { location, message },
            FindingCode::DanglingStateRef(state) => ConfigError::DanglingStateRef { state: state.clone(), location },
            _ => ConfigError::Invalid { location, message },
        }
    }
}

/// Looks up a localized label: requested language, then the bundle default.
///
/// A key that exists only in other languages resolves to the key itself (with
/// a warning) so narration never stops on a missing translation.
pub fn resolve_label(config: &GameConfig, key: &str, language: &str) -> Result<String, ConfigError> {
    let Some(variants) = config.labels.get(key) else {
        return Err(ConfigError::UnknownLabelKey(key.to_string()));
    };
    if let Some(t) = variants.get(language).or_else(|| variants.get(&config.default_language)) {
        return Ok(t.clone());
    }
    tracing::warn!(key, language, "label has neither the requested nor the default language; speaking the key");
    Ok(key.to_string())
}

/// Built-in English texts used when a bundle does not define a label.
pub fn builtin_label(key: &str) -> Option<&'static str> {
    Some(match key {
        "nav_position" => "{content}, Row {r} of {R}, Column {c} of {C}",
        "nav_edge" => "Edge",
        "nav_empty" => "Nothing to navigate here",
        "description_unavailable" => "Description unavailable",
        "answer_unavailable" => "Answer unavailable",
        "unsupported_action" => "This action is not available in this mode",
        "paused" => "Paused",
        "resumed" => "Resumed",
        "state_unknown" => "Unknown screen",
        "state_query" => "{label}: {value}.",
        "no_value" => "No information yet",
        _ => return None,
    })
}

impl GameConfig {
    /// Label text for runtime narration: bundle label, then built-in default,
    /// then the key itself.
    pub fn text(&self, key: &str, language: &str) -> String {
        match resolve_label(self, key, language) {
            Ok(t) => t,
            Err(_) => builtin_label(key).map(str::to_string).unwrap_or_else(|| key.to_string()),
        }
    }

    pub fn has_label(&self, key: &str) -> bool {
        self.labels.contains_key(key)
    }
}

/// Replaces `{name}` placeholders in `template` in a single pass; unknown
/// placeholders are left as they are.
pub fn fill_template(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        match after.find('}') {
            Some(close) => {
                let name = &after[..close];
                match vars.iter().find(|(n, _)| *n == name) {
                    Some((_, v)) => out.push_str(v),
                    None => {
                        out.push('{');
                        out.push_str(name);
                        out.push('}');
                    }
                }
                rest = &after[close + 1..];
            }
            None => {
                out.push_str(&rest[open..]);
                rest = "";
            }
        }
    }
    out.push_str(rest);
    out
}
