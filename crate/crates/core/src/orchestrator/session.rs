use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use base64::Engine;
use serde::Serialize;

use super::adapter::adapt_game;
use super::log::{LogEntry, SessionLog};
use super::{Capabilities, Mode, SessionError};
use crate::act::{
    activate, announce, build_grid, dispatch_hotkey, execute_hotkey, hit_test, merge_element_sources, move_cursor,
    Direction, Facts, HotkeyContext, HotkeyOutcome, HoverTracker, NavCursor, NavigationGrid, OutputBackend,
    ROW_TOLERANCE,
};
use crate::clients::{Clients, ServiceKind, TtsService};
use crate::config::{
    Chord, Element, ElementMap, GameConfig, HotkeyBinding, HotkeyKind, HotkeyOptions, NormalizedBlock, Profile,
    Provenance, UNKNOWN_STATE,
};
use crate::describe::{
    assess_change, brief_feedback, describe_rich, item_label, ask_question, route_for, spatial_params_with,
    DescriptionCache, DescriptionSource, Origin, Route, SpeechItem, SpeechQueue,
};
use crate::detect::{
    ocr_region, CueClassifier, Debouncer, DetectionEvent, EventPayload, ItemDetection, Sightings, StateClassifier,
    TemplateMatcher, TextDetection,
};
use crate::exec::Execution;
use crate::frames::{Frame, FrameSource, InputEvent, InputKind};

pub const SCENE_PROMPT: &str = "describe_scene";

#[derive(Debug, Clone)]
pub struct SessionOptions {
    pub mode: Mode,
    pub profile: Profile,
    pub language: String,
    pub exec: Execution,
    /// Passed to the game adapter.
    pub window_title: String,
    /// Minimum spacing of full-screen OCR passes in baseline mode.
    pub ocr_interval_ms: u64,
}

impl SessionOptions {
    pub fn new(mode: Mode) -> Self {
        SessionOptions {
            mode,
            profile: Profile::blind(),
            language: "en".into(),
            exec: Execution::default(),
            window_title: String::new(),
            ocr_interval_ms: 500,
        }
    }

    pub fn with_profile(mut self, profile: Profile) -> Self {
        self.profile = profile;
        self
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_title(mut self, title: impl Into<String>) -> Self {
        self.window_title = title.into();
        self
    }
}

/// The configuration used when no bundle assets are active: scene, region
/// and question prompts plus the replay and pause keys.
pub fn general_config(game_id: &str) -> GameConfig {
    let mut c = GameConfig::empty(game_id);
    c.prompts.insert(
        SCENE_PROMPT.into(),
        "Describe this game screen for a blind player in two sentences. Previously: {previous}".into(),
    );
    c.prompts.insert("describe_region".into(), "Describe this part of the game screen briefly.".into());
    c.prompts.insert("question".into(), crate::describe::DEFAULT_QUESTION_PROMPT.into());
    for (key, id, kind) in [("<alt>+r", "replay", HotkeyKind::ReplayLast), ("<alt>+p", "pause", HotkeyKind::PauseResume)] {
        c.hotkeys.push(HotkeyBinding {
            key: key.parse::<Chord>().expect("static chord"),
            id: id.into(),
            kind,
            options: HotkeyOptions::default(),
            active_states: Vec::new(),
        });
    }
    c
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionState {
    pub state_id: String,
    pub mode: Mode,
    pub profile: Profile,
    pub grid: Option<NavigationGrid>,
    pub cursor: NavCursor,
    /// Merged map of the current screen; hover hit-tests against it.
    pub element_map: ElementMap,
    pub hotkeys: Vec<HotkeyBinding>,
    pub facts: Facts,
    pub items: Vec<ItemDetection>,
    /// Text from the last full-screen OCR pass.
    pub texts: Vec<TextDetection>,
    pub last_description: Option<String>,
}

/// One accessibility session over a stream of frames and player input.
pub struct Session {
    config: GameConfig,
    opts: SessionOptions,
    caps: Capabilities,
    clients: Clients,
    backend: Arc<dyn OutputBackend>,
    cache: Arc<DescriptionCache>,
    queue: SpeechQueue,
    log: SessionLog,
    classifier: Option<CueClassifier>,
    matcher: Option<TemplateMatcher>,
    debouncer: Debouncer,
    hover: HoverTracker,
    state: SessionState,
    frame: Option<Frame>,
    /// Monitored block id -> frames of OCR still owed.
    ocr_pending: BTreeMap<String, u32>,
    last_ocr: Option<(u64, u64)>,
    adapted: bool,
    stop: Arc<AtomicBool>,
    now: u64,
}

impl std::fmt::Debug for Session {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Session").field("mode", &self.opts.mode).field("state", &self.state.state_id).finish_non_exhaustive()
    }
}

impl Session {
    /// Starts a session. Full mode uses `bundle` as is; the other modes keep
    /// only its id and language.
    pub fn new(
        bundle: &GameConfig,
        opts: SessionOptions,
        clients: Clients,
        tts: Arc<dyn TtsService>,
        backend: Arc<dyn OutputBackend>,
    ) -> Result<Self, SessionError> {
        let caps = Capabilities::of(opts.mode);
        let config = if opts.mode == Mode::Full {
            let report = crate::config::validate_config(bundle);
            if let Some(f) = report.errors().next() {
                return Err(crate::config::ConfigError::Invalid { location: f.location.clone(), message: f.message.clone() }.into());
            }
            bundle.clone()
        } else {
            let mut c = general_config(&bundle.game_id);
            c.default_language = bundle.default_language.clone();
            c
        };
        let classifier = caps.cues.then(|| CueClassifier::new(&config.cues, config.detect.accept, opts.exec));
        let matcher =
            (caps.templates && !config.templates.is_empty()).then(|| TemplateMatcher::new(&config.templates, opts.exec));
        let debouncer = Debouncer::new(config.detect.debounce_n, config.detect.item_quantum);
        let state = SessionState {
            state_id: UNKNOWN_STATE.into(),
            mode: opts.mode,
            profile: opts.profile,
            grid: None,
            cursor: NavCursor::ORIGIN,
            element_map: ElementMap::new(UNKNOWN_STATE, Vec::new()),
            hotkeys: active_hotkeys(&config, UNKNOWN_STATE),
            facts: Facts::new(),
            items: Vec::new(),
            texts: Vec::new(),
            last_description: None,
        };
        let mut log = SessionLog::new();
        log.push(0, LogEntry::Mode { mode: opts.mode });
        Ok(Session {
            config,
            opts,
            caps,
            clients,
            backend,
            cache: Arc::new(DescriptionCache::in_memory()),
            queue: SpeechQueue::new(tts),
            log,
            classifier,
            matcher,
            debouncer,
            hover: HoverTracker::new(),
            state,
            frame: None,
            ocr_pending: BTreeMap::new(),
            last_ocr: None,
            adapted: false,
            stop: Arc::new(AtomicBool::new(false)),
            now: 0,
        })
    }

    pub fn with_cache(mut self, cache: Arc<DescriptionCache>) -> Self {
        self.cache = cache;
        self
    }

    /// Mirrors the log to `path` as JSON lines. Records already written are
    /// copied over.
    pub fn with_log_file(mut self, path: &Path) -> Result<Self, SessionError> {
        let mut log = SessionLog::to_file(path)?;
        for r in self.log.records() {
            log.push(r.t_ms, r.entry.clone());
        }
        self.log = log;
        Ok(self)
    }

    /// Setting the flag ends [`Session::run`] after the current frame.
    pub fn stop_handle(&self) -> Arc<AtomicBool> {
        Arc::clone(&self.stop)
    }

    pub fn state(&self) -> &SessionState {
        &self.state
    }

    pub fn grid(&self) -> Option<&NavigationGrid> {
        self.state.grid.as_ref()
    }

    pub fn cursor(&self) -> NavCursor {
        self.state.cursor
    }

    pub fn log(&self) -> &SessionLog {
        &self.log
    }

    pub fn queue(&self) -> &SpeechQueue {
        &self.queue
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn capabilities(&self) -> Capabilities {
        self.caps
    }

    pub fn clients(&self) -> &Clients {
        &self.clients
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn last_frame(&self) -> Option<&Frame> {
        self.frame.as_ref()
    }

    /// Processes frames and inputs in timestamp order until the source is
    /// exhausted or the stop flag is set, then lets the speech queue finish.
    pub fn run(&mut self, source: &mut dyn FrameSource, inputs: &[InputEvent]) -> Result<(), SessionError> {
        let mut inputs = inputs.to_vec();
        inputs.sort_by_key(|e| e.t_ms);
        let mut pending = inputs.iter().peekable();
        while !self.stop.load(Ordering::SeqCst) {
            let Some(frame) = source.next_frame()? else { break };
            while let Some(ev) = pending.next_if(|e| e.t_ms < frame.timestamp_ms) {
                self.on_input(ev);
            }
            self.on_frame(frame);
        }
        if !self.stop.load(Ordering::SeqCst) {
            for ev in pending {
                self.on_input(ev);
            }
        }
        self.finish()
    }

    /// Lets queued speech play out and flushes the log.
    pub fn finish(&mut self) -> Result<(), SessionError> {
        self.now = self.queue.drain().max(self.now);
        self.log.flush()
    }

    pub fn on_frame(&mut self, frame: Frame) {
        self.now = self.now.max(frame.timestamp_ms);
        self.queue.advance(self.now);
        if self.caps.adapter && !self.adapted {
            self.adapted = true;
            self.adapt(&frame);
        }
        let prev = self.frame.replace(frame);
        let frame = self.frame.clone().expect("frame just stored");

        let mut rich = false;
        let mut brief = prev.is_none();
        if self.caps.change_routing && self.config.change.enabled {
            if let Some(prev) = prev.as_ref().filter(|p| p.dimensions() == frame.dimensions()) {
                match assess_change(prev, &frame, &self.config.change, self.opts.exec) {
                    Ok(a) => {
                        let (t1, t2) = (self.config.change.threshold1, self.config.change.threshold2);
                        for (id, d) in &a.regions {
                            if route_for(*d, t1, t2) != Route::Silent {
                                self.ocr_pending.insert(id.clone(), self.config.detect.debounce_n);
                            }
                        }
                        rich = a.route == Route::Rich;
                        brief |= a.route == Route::Brief;
                        self.log.push(self.now, LogEntry::Change { assessment: a });
                    }
                    Err(e) => self.warn(format!("change assessment skipped: {e}")),
                }
            }
        }

        if self.caps.grids {
            self.detect_full(&frame);
        } else {
            let due = match self.opts.mode {
                Mode::BaselineOcr => {
                    let key = frame.content_key();
                    self.last_ocr.is_none_or(|(k, at)| k != key && self.now >= at + self.opts.ocr_interval_ms)
                }
                _ => brief || rich,
            };
            if due {
                self.refresh_text(&frame);
            }
        }

        if rich && self.caps.vlm_descriptions {
            self.describe_scene(&frame);
        }
    }

    fn adapt(&mut self, frame: &Frame) {
        match adapt_game(frame, &self.opts.window_title, &self.config, &self.clients) {
            Ok(cfg) => {
                self.config = cfg;
                self.state.hotkeys = active_hotkeys(&self.config, &self.state.state_id);
                self.log.push(self.now, LogEntry::Adapter { accepted: true, detail: "temporary configuration applied".into() });
            }
            Err(e) => self.log.push(self.now, LogEntry::Adapter { accepted: false, detail: e.to_string() }),
        }
    }

    fn detect_full(&mut self, frame: &Frame) {
        let mut sightings = Sightings {
            state: self.classifier.as_ref().map(|c| c.classify(frame)),
            items: self.matcher.as_ref().map(|m| {
                let d = &self.config.detect;
                m.find(frame, d.match_threshold, d.item_search.as_ref(), d.nms_iou)
            }),
            texts: BTreeMap::new(),
        };
        let owed: Vec<String> = self.ocr_pending.keys().cloned().collect();
        for id in owed {
            let Some(block) = self.config.change.blocks.iter().find(|b| b.id == id).map(|b| b.block) else {
                self.ocr_pending.remove(&id);
                continue;
            };
            if let Some(texts) = self.ocr(frame, &block, &id) {
                sightings.texts.insert(id.clone(), texts);
            }
            let left = self.ocr_pending.get_mut(&id).expect("owed block");
            *left -= 1;
            if *left == 0 {
                self.ocr_pending.remove(&id);
            }
        }
        let events = self.debouncer.update(&sightings, frame.timestamp_ms);
        for event in events {
            self.on_event(event, frame);
        }
    }

    fn on_event(&mut self, event: DetectionEvent, frame: &Frame) {
        self.log.push(self.now, LogEntry::Event { event: event.clone() });
        match &event.payload {
            EventPayload::StateChanged { state_id, .. } => {
                self.state.state_id = state_id.clone();
                self.hover.reset();
                self.state.hotkeys = active_hotkeys(&self.config, state_id);
                self.state.items = self.debouncer.active_items().into_iter().cloned().collect();
                self.state.texts = self.ocr(frame, &NormalizedBlock::FULL, "screen").unwrap_or_default();
                if state_id != UNKNOWN_STATE && !self.config.element_maps.contains_key(state_id) {
                    self.warn(format!("no element map for state {state_id:?}"));
                }
                self.rebuild_grid(true);
                for b in &self.config.change.blocks {
                    self.ocr_pending.insert(b.id.clone(), self.config.detect.debounce_n);
                }
            }
            EventPayload::ItemAppeared { template_name, block, .. } => {
                let (cx, cy) = block.center();
                let label = item_label(&self.config, template_name, &self.opts.language);
                for b in self.config.change.blocks.iter().filter(|b| b.block.contains(cx, cy)) {
                    self.state.facts.insert(b.id.clone(), label.clone());
                }
                self.state.items = self.debouncer.active_items().into_iter().cloned().collect();
                self.rebuild_grid(false);
            }
            EventPayload::ItemVanished { .. } => {
                self.state.items = self.debouncer.active_items().into_iter().cloned().collect();
                self.rebuild_grid(false);
            }
            EventPayload::TextChanged { region_id, texts } => {
                let joined = texts.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(", ");
                self.state.facts.insert(region_id.clone(), joined);
            }
        }
        for item in brief_feedback(std::slice::from_ref(&event), &self.config, &self.opts.language) {
            self.speak(item);
        }
    }

    /// Merges detected items, the state's annotated map and the last
    /// full-screen OCR into the element map and navigation grid.
    fn rebuild_grid(&mut self, reset_cursor: bool) {
        let state_id = self.state.state_id.clone();
        let lang = &self.opts.language;
        let parser: Vec<Element> = self
            .state
            .items
            .iter()
            .map(|d| {
                Element::new(d.block, item_label(&self.config, &d.template_name, lang), true).with_provenance(Provenance::Parser)
            })
            .collect();
        let manual = self.config.element_maps.get(&state_id).map(|m| m.elements.as_slice()).unwrap_or(&[]);
        let map = merge_element_sources(&state_id, &parser, manual, &self.state.texts);
        self.set_map(map, reset_cursor);
    }

    fn set_map(&mut self, map: ElementMap, reset_cursor: bool) {
        self.state.grid = build_grid(&map, ROW_TOLERANCE).ok();
        self.state.element_map = map;
        if reset_cursor {
            self.state.cursor = NavCursor::ORIGIN;
        } else if let Some(g) = &self.state.grid {
            let r = self.state.cursor.r.clamp(1, g.row_count());
            let c = self.state.cursor.c.clamp(1, g.rows[r - 1].len());
            self.state.cursor = NavCursor { r, c };
        }
    }

    /// Screen-reader style pass: every OCR line becomes a navigable element.
    fn refresh_text(&mut self, frame: &Frame) {
        self.last_ocr = Some((frame.content_key(), self.now));
        let Some(texts) = self.ocr(frame, &NormalizedBlock::FULL, "screen") else { return };
        let changed = texts.iter().map(|t| &t.text).ne(self.state.texts.iter().map(|t| &t.text));
        let elements = texts
            .iter()
            .map(|t| Element::new(t.block, t.text.clone(), true).with_provenance(Provenance::Ocr))
            .collect();
        self.state.texts = texts;
        if changed {
            self.hover.reset();
            self.set_map(ElementMap::new(self.state.state_id.clone(), elements), true);
            if !self.state.texts.is_empty() {
                let joined = self.state.texts.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(", ");
                self.speak(SpeechItem::normal(joined, Origin::Event));
            }
        }
    }

    fn describe_scene(&mut self, frame: &Frame) {
        if !self.config.prompts.contains_key(SCENE_PROMPT) {
            self.warn(format!("prompt {SCENE_PROMPT:?} is not configured"));
            return;
        }
        let result = describe_rich(
            frame,
            SCENE_PROMPT,
            &self.config,
            &self.cache,
            &self.clients,
            &self.opts.language,
            self.state.last_description.as_deref(),
            self.now,
        );
        match result {
            Ok(d) => {
                let detail = match d.source {
                    DescriptionSource::Vlm => "described",
                    DescriptionSource::Cache => "cache hit",
                    DescriptionSource::Preset => "unavailable",
                };
                self.log.push(
                    self.now,
                    LogEntry::ClientCall { service: ServiceKind::Vlm, ok: d.source != DescriptionSource::Preset, detail: detail.into() },
                );
                self.state.last_description = Some(d.text.clone());
                self.speak(SpeechItem::normal(d.text, Origin::Description));
            }
            Err(e) => self.warn(e.to_string()),
        }
    }

    fn ocr(&mut self, frame: &Frame, block: &NormalizedBlock, region: &str) -> Option<Vec<TextDetection>> {
        match ocr_region(frame, block, &self.clients) {
            Ok(t) => Some(t),
            Err(e) => {
                self.log.push(self.now, LogEntry::ClientCall { service: ServiceKind::Ocr, ok: false, detail: format!("{region}: {e}") });
                None
            }
        }
    }

    pub fn on_input(&mut self, event: &InputEvent) {
        self.now = self.now.max(event.t_ms);
        self.queue.advance(self.now);
        self.log.push(self.now, LogEntry::Input { input: event.kind.clone() });
        match &event.kind {
            InputKind::Key { key } => self.on_key(key),
            InputKind::MouseMove { x, y } => self.on_hover(*x, *y),
            InputKind::MouseClick { .. } => {}
            InputKind::Voice { audio_b64 } => self.on_voice(audio_b64),
        }
    }

    fn on_key(&mut self, key: &str) {
        if let Some(dir) = Direction::from_key(key) {
            match &self.state.grid {
                Some(grid) => {
                    let (cursor, item) = move_cursor(grid, self.state.cursor, dir, &self.config, &self.opts.language);
                    self.state.cursor = cursor;
                    self.speak(item);
                }
                None => self.speak(SpeechItem::low(self.config.text("nav_empty", &self.opts.language), Origin::Navigation)),
            }
            return;
        }
        match key.to_ascii_lowercase().as_str() {
            "enter" | "return" | "space" | " " => return self.on_activate(),
            _ => {}
        }
        match key.parse::<Chord>() {
            Ok(chord) if chord.has_modifiers() => self.on_chord(&chord),
            _ => self.warn(format!("key {key:?} is not bound")),
        }
    }

    fn on_activate(&mut self) {
        if !self.caps.clicks {
            self.unsupported("activate");
            return;
        }
        let (Some(grid), Some(frame)) = (&self.state.grid, &self.frame) else {
            self.speak(SpeechItem::low(self.config.text("nav_empty", &self.opts.language), Origin::Navigation));
            return;
        };
        match activate(grid, self.state.cursor, frame.dimensions(), self.backend.as_ref()) {
            Ok(result) => self.log.push(self.now, LogEntry::Action { result }),
            Err(e) => self.warn(format!("activation failed: {e}")),
        }
    }

    fn on_chord(&mut self, chord: &Chord) {
        let Some(binding) = dispatch_hotkey(&self.state.hotkeys, chord, &self.state.state_id).cloned() else {
            self.warn(format!("no hotkey for {chord} in state {:?}", self.state.state_id));
            return;
        };
        if binding.kind == HotkeyKind::ClickBlock && !self.caps.clicks {
            self.unsupported(&binding.id);
            return;
        }
        let Some(frame) = self.frame.clone() else {
            self.warn(format!("hotkey {:?} before the first frame", binding.id));
            return;
        };
        let mut ctx = HotkeyContext {
            frame: &frame,
            config: &self.config,
            language: &self.opts.language,
            cache: &self.cache,
            clients: &self.clients,
            backend: self.backend.as_ref(),
            facts: &self.state.facts,
            queue: &mut self.queue,
            previous_description: self.state.last_description.as_deref(),
            now: self.now,
        };
        match execute_hotkey(&binding, &mut ctx) {
            Ok(HotkeyOutcome::Action(result)) => self.log.push(self.now, LogEntry::Action { result }),
            Ok(HotkeyOutcome::Speech(item)) => {
                if item.origin == Origin::Description {
                    self.state.last_description = Some(item.text.clone());
                }
                self.speak(item);
            }
            Ok(HotkeyOutcome::Replayed(item)) => {
                self.log.push(self.now, LogEntry::Queue { control: "replay".into(), text: Some(item.text) })
            }
            Ok(HotkeyOutcome::Paused) => self.log.push(self.now, LogEntry::Queue { control: "pause".into(), text: None }),
            Ok(HotkeyOutcome::Resumed) => self.log.push(self.now, LogEntry::Queue { control: "resume".into(), text: None }),
            Err(e) => self.warn(format!("hotkey {:?} failed: {e}", binding.id)),
        }
    }

    fn on_hover(&mut self, x: f64, y: f64) {
        if !self.caps.hover || !self.opts.profile.mouse_enabled() {
            return;
        }
        let hit = hit_test(&self.state.element_map, x, y);
        if let Some(el) = self.hover.update(hit) {
            if el.content.trim().is_empty() {
                return;
            }
            let item = SpeechItem::low(el.content.clone(), Origin::Navigation)
                .with_spatial(spatial_params_with(&el.block, &self.config.spatial));
            self.speak(item);
        }
    }

    fn on_voice(&mut self, audio_b64: &str) {
        if !self.caps.questions {
            self.unsupported("question");
            return;
        }
        let Ok(audio) = base64::engine::general_purpose::STANDARD.decode(audio_b64) else {
            self.warn("voice input is not valid base64".into());
            return;
        };
        let hotwords = self.hotwords();
        let transcript = match self.clients.call_asr(&audio, &hotwords) {
            Ok(t) => {
                self.log.push(self.now, LogEntry::ClientCall { service: ServiceKind::Asr, ok: true, detail: t.clone() });
                t
            }
            Err(e) => {
                self.log.push(self.now, LogEntry::ClientCall { service: ServiceKind::Asr, ok: false, detail: e.to_string() });
                return;
            }
        };
        let Some(frame) = self.frame.clone() else {
            self.warn("question before the first frame".into());
            return;
        };
        match ask_question(&transcript, &frame, &self.config, &self.clients, &self.opts.language) {
            Ok(item) => self.speak(item),
            Err(e) => self.warn(e.to_string()),
        }
    }

    /// Item labels, so recognition favours the game's own vocabulary.
    fn hotwords(&self) -> Vec<String> {
        let mut words: Vec<String> =
            self.config.templates.keys().map(|t| item_label(&self.config, t, &self.opts.language)).collect();
        words.sort();
        words.dedup();
        words
    }

    fn unsupported(&mut self, action: &str) {
        self.log.push(self.now, LogEntry::Unsupported { action: action.into() });
        self.speak(SpeechItem::normal(self.config.text("unsupported_action", &self.opts.language), Origin::Answer));
    }

    fn speak(&mut self, item: SpeechItem) {
        let effect = self.queue.submit(item.clone(), self.now);
        self.log_speech(&item, effect);
    }

    fn log_speech(&mut self, item: &SpeechItem, effect: crate::describe::QueueEffect) {
        self.log.push(
            self.now,
            LogEntry::Speech { text: item.text.clone(), priority: item.priority, origin: item.origin, effect },
        );
    }

    fn warn(&mut self, message: String) {
        tracing::warn!("{message}");
        self.log.push(self.now, LogEntry::Warning { message });
    }

    /// Announces the element under the cursor without moving.
    pub fn where_am_i(&mut self) {
        if let Some(grid) = &self.state.grid {
            let item = announce(grid, self.state.cursor, &self.config, &self.opts.language, false);
            self.speak(item);
        }
    }
}

fn active_hotkeys(config: &GameConfig, state: &str) -> Vec<HotkeyBinding> {
    config.hotkeys.iter().filter(|b| b.active_in(state)).cloned().collect()
}

/// Runs a whole session over `source` and `inputs`.
pub fn run_session(
    bundle: &GameConfig,
    opts: SessionOptions,
    source: &mut dyn FrameSource,
    inputs: &[InputEvent],
    clients: Clients,
    tts: Arc<dyn TtsService>,
    backend: Arc<dyn OutputBackend>,
) -> Result<Session, SessionError> {
    let mut session = Session::new(bundle, opts, clients, tts, backend)?;
    session.run(source, inputs)?;
    Ok(session)
}
