//! Temporal filtering of raw per-frame sightings.
//!
//! A sighting only becomes an event once it has been seen in `n` consecutive
//! frames, and events fire on edges only.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{ItemDetection, StateClassification, TextDetection};
use crate::config::NormalizedBlock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    StateChanged,
    ItemAppeared,
    ItemVanished,
    TextChanged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventPayload {
    StateChanged { state_id: String, score: f64 },
    ItemAppeared { template_name: String, block: NormalizedBlock, score: f64 },
    ItemVanished { template_name: String, block: NormalizedBlock },
    TextChanged { region_id: String, texts: Vec<TextDetection> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionEvent {
    #[serde(flatten)]
    pub payload: EventPayload,
    pub first_seen: u64,
    pub confirmed_at: u64,
}

impl DetectionEvent {
    pub fn kind(&self) -> EventKind {
        match self.payload {
            EventPayload::StateChanged { .. } => EventKind::StateChanged,
            EventPayload::ItemAppeared { .. } => EventKind::ItemAppeared,
            EventPayload::ItemVanished { .. } => EventKind::ItemVanished,
            EventPayload::TextChanged { .. } => EventKind::TextChanged,
        }
    }
}

/// Raw output of one detection pass. `None` means the detector did not run
/// on this frame, which leaves its filter untouched.
#[derive(Debug, Clone, Default)]
pub struct Sightings {
    pub state: Option<StateClassification>,
    pub items: Option<Vec<ItemDetection>>,
    /// OCR results per monitored region id.
    pub texts: BTreeMap<String, Vec<TextDetection>>,
}

#[derive(Debug, Clone)]
struct Run<T> {
    value: T,
    first_seen: u64,
    count: u32,
}

#[derive(Debug, Clone)]
struct ItemTrack {
    present: u32,
    absent: u32,
    run_start: u64,
    active: bool,
    latest: ItemDetection,
}

type ItemKey = (String, i64, i64);

#[derive(Debug, Clone)]
pub struct Debouncer {
    n: u32,
    quantum: f64,
    state_run: Option<Run<(String, f64)>>,
    last_state: Option<String>,
    items: BTreeMap<ItemKey, ItemTrack>,
    text_runs: BTreeMap<String, Run<Vec<TextDetection>>>,
    last_texts: BTreeMap<String, Vec<String>>,
    last_t: Option<u64>,
}

impl Debouncer {
    /// `n` consecutive frames confirm a change; item positions are
    /// quantized to `quantum` (normalized units) when keying.
    pub fn new(n: u32, quantum: f64) -> Self {
        Debouncer {
            n: n.max(1),
            quantum: if quantum > 0.0 { quantum } else { 0.025 },
            state_run: None,
            last_state: None,
            items: BTreeMap::new(),
            text_runs: BTreeMap::new(),
            last_texts: BTreeMap::new(),
            last_t: None,
        }
    }

    pub fn confirmed_state(&self) -> Option<&str> {
        self.last_state.as_deref()
    }

    /// Items currently confirmed present.
    pub fn active_items(&self) -> Vec<&ItemDetection> {
        self.items.values().filter(|t| t.active).map(|t| &t.latest).collect()
    }

    fn key(&self, d: &ItemDetection) -> ItemKey {
        let (cx, cy) = d.block.center();
        (d.template_name.clone(), (cx / self.quantum).round() as i64, (cy / self.quantum).round() as i64)
    }

    pub fn update(&mut self, sightings: &Sightings, t_ms: u64) -> Vec<DetectionEvent> {
        if let Some(prev) = self.last_t {
            if t_ms < prev {
                tracing::warn!(t_ms, prev, "non-monotonic sighting timestamp");
            }
        }
        self.last_t = Some(t_ms);
        let mut events = Vec::new();
        if let Some(state) = &sightings.state {
            self.update_state(state, t_ms, &mut events);
        }
        if let Some(items) = &sightings.items {
            self.update_items(items, t_ms, &mut events);
        }
        for (region, texts) in &sightings.texts {
            self.update_text(region, texts, t_ms, &mut events);
        }
        events
    }

    fn update_state(&mut self, s: &StateClassification, t: u64, events: &mut Vec<DetectionEvent>) {
        match &mut self.state_run {
            Some(run) if run.value.0 == s.state_id => {
                run.count += 1;
                run.value.1 = s.score;
            }
            _ => self.state_run = Some(Run { value: (s.state_id.clone(), s.score), first_seen: t, count: 1 }),
        }
        let run = self.state_run.as_ref().expect("run just set");
        if run.count >= self.n && self.last_state.as_deref() != Some(run.value.0.as_str()) {
            self.last_state = Some(run.value.0.clone());
            events.push(DetectionEvent {
                payload: EventPayload::StateChanged { state_id: run.value.0.clone(), score: run.value.1 },
                first_seen: run.first_seen,
                confirmed_at: t,
            });
        }
    }

    fn update_items(&mut self, items: &[ItemDetection], t: u64, events: &mut Vec<DetectionEvent>) {
        let mut seen: BTreeMap<ItemKey, &ItemDetection> = BTreeMap::new();
        for d in items {
            let k = self.key(d);
            match seen.get(&k) {
                Some(prev) if prev.score >= d.score => {}
                _ => {
                    seen.insert(k, d);
                }
            }
        }
        let n = self.n;
        for (k, d) in &seen {
            let track = self.items.entry(k.clone()).or_insert_with(|| ItemTrack {
                present: 0,
                absent: 0,
                run_start: t,
                active: false,
                latest: (*d).clone(),
            });
            if track.present == 0 {
                track.run_start = t;
            }
            track.present += 1;
            track.absent = 0;
            track.latest = (*d).clone();
            if !track.active && track.present >= n {
                track.active = true;
                events.push(DetectionEvent {
                    payload: EventPayload::ItemAppeared {
                        template_name: d.template_name.clone(),
                        block: d.block,
                        score: d.score,
                    },
                    first_seen: track.run_start,
                    confirmed_at: t,
                });
            }
        }
        let seen_keys: BTreeSet<&ItemKey> = seen.keys().collect();
        let mut drop = Vec::new();
        for (k, track) in self.items.iter_mut() {
            if seen_keys.contains(k) {
                continue;
            }
            if track.absent == 0 {
                track.run_start = t;
            }
            track.present = 0;
            track.absent += 1;
            if !track.active {
                drop.push(k.clone());
            } else if track.absent >= n {
                events.push(DetectionEvent {
                    payload: EventPayload::ItemVanished {
                        template_name: track.latest.template_name.clone(),
                        block: track.latest.block,
                    },
                    first_seen: track.run_start,
                    confirmed_at: t,
                });
                drop.push(k.clone());
            }
        }
        for k in drop {
            self.items.remove(&k);
        }
    }

    fn update_text(&mut self, region: &str, texts: &[TextDetection], t: u64, events: &mut Vec<DetectionEvent>) {
        let set = text_set(texts);
        match self.text_runs.get_mut(region) {
            Some(run) if text_set(&run.value) == set => {
                run.count += 1;
                run.value = texts.to_vec();
            }
            _ => {
                self.text_runs.insert(region.to_string(), Run { value: texts.to_vec(), first_seen: t, count: 1 });
            }
        }
        let run = &self.text_runs[region];
        let last = self.last_texts.get(region).cloned().unwrap_or_default();
        if run.count >= self.n && last != set {
            self.last_texts.insert(region.to_string(), set);
            events.push(DetectionEvent {
                payload: EventPayload::TextChanged { region_id: region.to_string(), texts: run.value.clone() },
                first_seen: run.first_seen,
                confirmed_at: t,
            });
        }
    }
}

fn text_set(texts: &[TextDetection]) -> Vec<String> {
    let mut v: Vec<String> = texts.iter().map(|t| t.text.clone()).collect();
    v.sort();
    v
}
