use std::collections::BTreeMap;

use super::backend::{click_block, ActionKind, ActionResult, OutputBackend};
use super::ActError;
use crate::clients::Clients;
use crate::config::{fill_template, Chord, GameConfig, HotkeyBinding, HotkeyKind};
use crate::describe::{describe_rich, spatial_params_with, DescriptionCache, Origin, SpeechItem, SpeechQueue};
use crate::frames::Frame;

/// Latest known values (discard pile, score, ...) kept from detections.
pub type Facts = BTreeMap<String, String>;

/// First binding for `chord` that is active in `state`. Later matches are
/// ignored with a warning.
pub fn dispatch_hotkey<'a>(bindings: &'a [HotkeyBinding], chord: &Chord, state: &str) -> Option<&'a HotkeyBinding> {
    let mut matches = bindings.iter().filter(|b| &b.key == chord && b.active_in(state));
    let first = matches.next()?;
    for other in matches {
        tracing::warn!(chord = %chord, first = %first.id, ignored = %other.id, state, "ambiguous hotkey");
    }
    Some(first)
}

#[derive(Debug, Clone, PartialEq)]
pub enum HotkeyOutcome {
    Action(ActionResult),
    Speech(SpeechItem),
    Replayed(SpeechItem),
    Paused,
    Resumed,
}

/// Everything a hotkey may touch.
pub struct HotkeyContext<'a> {
    pub frame: &'a Frame,
    pub config: &'a GameConfig,
    pub language: &'a str,
    pub cache: &'a DescriptionCache,
    pub clients: &'a Clients,
    pub backend: &'a dyn OutputBackend,
    pub facts: &'a Facts,
    pub queue: &'a mut SpeechQueue,
    pub previous_description: Option<&'a str>,
    pub now: u64,
}

pub fn execute_hotkey(binding: &HotkeyBinding, ctx: &mut HotkeyContext<'_>) -> Result<HotkeyOutcome, ActError> {
    let block = || binding.options.block.ok_or_else(|| ActError::MissingBlock(binding.id.clone()));
    match binding.kind {
        HotkeyKind::DescribeRegion => {
            let block = block()?;
            let prompt = binding.options.prompt.as_deref().unwrap_or("describe_region");
            let d = describe_rich(
                &ctx.frame.crop(&block),
                prompt,
                ctx.config,
                ctx.cache,
                ctx.clients,
                ctx.language,
                ctx.previous_description,
                ctx.now,
            )?;
            Ok(HotkeyOutcome::Speech(
                SpeechItem::normal(d.text, Origin::Description).with_spatial(spatial_params_with(&block, &ctx.config.spatial)),
            ))
        }
        HotkeyKind::ClickBlock => {
            let block = block()?;
            let point = click_block(&block, ctx.frame.dimensions(), ctx.backend)?;
            Ok(HotkeyOutcome::Action(ActionResult { kind: ActionKind::Clicked, target: None, point: Some(point) }))
        }
        HotkeyKind::StateQuery => {
            let fact = binding.options.fact.as_deref().unwrap_or(&binding.id);
            let label_key = binding.options.prompt.as_deref().unwrap_or(&binding.id);
            let label = if ctx.config.has_label(label_key) { ctx.config.text(label_key, ctx.language) } else { label_key.to_string() };
            let value = match ctx.facts.get(fact) {
                Some(v) => v.clone(),
                None => ctx.config.text("no_value", ctx.language),
            };
            let text = fill_template(&ctx.config.text("state_query", ctx.language), &[("label", &label), ("value", &value)]);
            Ok(HotkeyOutcome::Speech(SpeechItem::normal(text, Origin::Answer)))
        }
        HotkeyKind::ReplayLast => {
            let (item, _) = ctx.queue.replay_last(ctx.now)?;
            Ok(HotkeyOutcome::Replayed(item))
        }
        HotkeyKind::PauseResume => {
            if ctx.queue.is_paused() {
                ctx.queue.resume(ctx.now);
                Ok(HotkeyOutcome::Resumed)
            } else {
                ctx.queue.pause(ctx.now);
                Ok(HotkeyOutcome::Paused)
            }
        }
    }
}
