use serde::{Deserialize, Serialize};

use super::cache::DescriptionCache;
use super::queue::{Origin, Priority, SpeechItem};
use super::spatial::spatial_params_with;
use crate::clients::Clients;
use crate::config::{fill_template, GameConfig, Severity};
use crate::detect::{DetectionEvent, EventPayload};
use crate::frames::Frame;

/// Prompt used for voice questions when the bundle has none.
pub const DEFAULT_QUESTION_PROMPT: &str =
    "You are assisting a blind player. Looking at this game screen, answer briefly: {question}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescriptionSource {
    Vlm,
    Cache,
    Preset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Description {
    pub text: String,
    pub source: DescriptionSource,
    pub image_key: u64,
    pub prompt_key: String,
    pub created_at: u64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DescribeError {
    #[error("prompt {0:?} is not defined in the bundle")]
    UnknownPrompt(String),
    #[error("question transcript is empty")]
    EmptyTranscript,
}

/// Speakable label for an item template: its bundle label, else the name.
pub fn item_label(config: &GameConfig, template: &str, language: &str) -> String {
    if config.has_label(template) {
        config.text(template, language)
    } else {
        template.to_string()
    }
}

/// Immediate speech for debounced detection events.
pub fn brief_feedback(events: &[DetectionEvent], config: &GameConfig, language: &str) -> Vec<SpeechItem> {
    let mut out = Vec::new();
    for e in events {
        match &e.payload {
            EventPayload::StateChanged { state_id, .. } => {
                let Some(cue) = config.cue(state_id) else { continue };
                let Some(msg) = cue.message_in(language, &config.default_language) else { continue };
                let priority = if cue.severity == Severity::Critical { Priority::Critical } else { Priority::Normal };
                out.push(SpeechItem::new(msg, priority, Origin::Event));
            }
            EventPayload::ItemAppeared { template_name, block, .. } => {
                out.push(
                    SpeechItem::normal(item_label(config, template_name, language), Origin::Event)
                        .with_spatial(spatial_params_with(block, &config.spatial)),
                );
            }
            EventPayload::TextChanged { texts, .. } if !texts.is_empty() => {
                let joined = texts.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(", ");
                out.push(
                    SpeechItem::normal(joined, Origin::Event).with_spatial(spatial_params_with(&texts[0].block, &config.spatial)),
                );
            }
            _ => {}
        }
    }
    out
}

/// Rich description of `region`, from the cache when possible.
///
/// The prompt template may use `{previous}` (the last description spoken)
/// and `{language}`. A failing VLM yields the `description_unavailable`
/// label instead of an error.
#[allow(clippy::too_many_arguments)]
pub fn describe_rich(
    region: &Frame,
    prompt_key: &str,
    config: &GameConfig,
    cache: &DescriptionCache,
    clients: &Clients,
    language: &str,
    previous: Option<&str>,
    now: u64,
) -> Result<Description, DescribeError> {
    let template = config.prompts.get(prompt_key).ok_or_else(|| DescribeError::UnknownPrompt(prompt_key.to_string()))?;
    let image_key = region.content_key();
    let make = |text: String, source| Description { text, source, image_key, prompt_key: prompt_key.to_string(), created_at: now };
    if let Some(text) = cache.get(image_key, prompt_key) {
        return Ok(make(text, DescriptionSource::Cache));
    }
    let prompt = fill_template(template, &[("previous", previous.unwrap_or("")), ("language", language)]);
    match clients.call_vlm(&region.encode_png(), &prompt) {
        Ok(reply) => {
            if let Err(e) = cache.put(image_key, prompt_key, &reply.text, now) {
                tracing::warn!("description not persisted: {e}");
            }
            Ok(make(reply.text, DescriptionSource::Vlm))
        }
        Err(e) => {
            tracing::warn!("vlm unavailable: {e}");
            Ok(make(config.text("description_unavailable", language), DescriptionSource::Preset))
        }
    }
}

/// Answers a spoken question about the current frame.
pub fn ask_question(
    transcript: &str,
    frame: &Frame,
    config: &GameConfig,
    clients: &Clients,
    language: &str,
) -> Result<SpeechItem, DescribeError> {
    let question = transcript.trim();
    if question.is_empty() {
        return Err(DescribeError::EmptyTranscript);
    }
    let template = config.prompts.get("question").map(String::as_str).unwrap_or(DEFAULT_QUESTION_PROMPT);
    let prompt = fill_template(template, &[("question", question), ("transcript", question), ("language", language)]);
    let text = match clients.call_vlm(&frame.encode_png(), &prompt) {
        Ok(reply) => reply.text,
        Err(e) => {
            tracing::warn!("question not answered: {e}");
            config.text("answer_unavailable", language)
        }
    };
    Ok(SpeechItem::normal(text, Origin::Answer))
}
