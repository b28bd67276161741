//! The prioritized speech queue.
//!
//! Time is supplied by the caller (`now` in session milliseconds), so a
//! replayed session produces the same utterance timeline on every run. The
//! queue is the only place speech reaches the TTS service.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::SpatialAudioParams;
use crate::clients::{ClientError, TtsService};

pub const HISTORY_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Priority {
    Critical,
    Normal,
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Event,
    Navigation,
    Description,
    Answer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeechItem {
    pub text: String,
    pub priority: Priority,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spatial: Option<SpatialAudioParams>,
    pub origin: Origin,
}

impl SpeechItem {
    pub fn new(text: impl Into<String>, priority: Priority, origin: Origin) -> Self {
        SpeechItem { text: text.into(), priority, spatial: None, origin }
    }

    pub fn critical(text: impl Into<String>, origin: Origin) -> Self {
        Self::new(text, Priority::Critical, origin)
    }

    pub fn normal(text: impl Into<String>, origin: Origin) -> Self {
        Self::new(text, Priority::Normal, origin)
    }

    pub fn low(text: impl Into<String>, origin: Origin) -> Self {
        Self::new(text, Priority::Low, origin)
    }

    pub fn with_spatial(mut self, spatial: SpatialAudioParams) -> Self {
        self.spatial = Some(spatial);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueueEffect {
    SpokenNow,
    Queued,
    PreemptedCurrent,
    Dropped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemStatus {
    Pending,
    Speaking,
    Spoken,
    /// Superseded, empty, or lost to a failing speaker.
    Dropped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistoryEntry {
    pub id: u64,
    pub item: SpeechItem,
    pub submitted_at: u64,
    pub status: ItemStatus,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QueueError {
    #[error("nothing to replay yet")]
    EmptyHistory,
}

#[derive(Debug, Clone)]
struct Pending {
    id: u64,
    item: SpeechItem,
}

#[derive(Debug, Clone)]
struct Current {
    id: u64,
    item: SpeechItem,
    started: u64,
    ends: u64,
}

/// Speaking-time model: a fixed per-character rate with a floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pace {
    pub ms_per_char: u64,
    pub min_ms: u64,
}

impl Default for Pace {
    fn default() -> Self {
        Pace { ms_per_char: 55, min_ms: 300 }
    }
}

impl Pace {
    pub fn duration(&self, text: &str) -> u64 {
        (self.ms_per_char * text.chars().count() as u64).max(self.min_ms)
    }
}

pub struct SpeechQueue {
    tts: Arc<dyn TtsService>,
    pace: Pace,
    pending: VecDeque<Pending>,
    current: Option<Current>,
    paused: bool,
    now: u64,
    next_id: u64,
    history: VecDeque<HistoryEntry>,
}

impl std::fmt::Debug for SpeechQueue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpeechQueue")
            .field("pending", &self.pending.len())
            .field("speaking", &self.current.as_ref().map(|c| &c.item.text))
            .field("paused", &self.paused)
            .field("now", &self.now)
            .finish()
    }
}

impl SpeechQueue {
    pub fn new(tts: Arc<dyn TtsService>) -> Self {
        Self::with_pace(tts, Pace::default())
    }

    pub fn with_pace(tts: Arc<dyn TtsService>, pace: Pace) -> Self {
        SpeechQueue {
            tts,
            pace,
            pending: VecDeque::new(),
            current: None,
            paused: false,
            now: 0,
            next_id: 0,
            history: VecDeque::with_capacity(HISTORY_LEN),
        }
    }

    pub fn is_paused(&self) -> bool {
        self.paused
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    /// Text being spoken right now.
    pub fn current(&self) -> Option<&SpeechItem> {
        self.current.as_ref().map(|c| &c.item)
    }

    pub fn pending(&self) -> Vec<&SpeechItem> {
        self.pending.iter().map(|p| &p.item).collect()
    }

    pub fn is_idle(&self) -> bool {
        self.current.is_none() && self.pending.is_empty()
    }

    /// Most recent first.
    pub fn history(&self) -> impl Iterator<Item = &HistoryEntry> {
        self.history.iter().rev()
    }

    fn set_status(&mut self, id: u64, status: ItemStatus) {
        if let Some(e) = self.history.iter_mut().find(|e| e.id == id) {
            e.status = status;
        }
    }

    fn record(&mut self, item: &SpeechItem, status: ItemStatus) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        if self.history.len() == HISTORY_LEN {
            self.history.pop_front();
        }
        self.history.push_back(HistoryEntry { id, item: item.clone(), submitted_at: self.now, status });
        id
    }

    /// Completes utterances that have finished by `now` and starts the next
    /// ones back to back.
    pub fn advance(&mut self, now: u64) {
        let now = now.max(self.now);
        loop {
            match &self.current {
                Some(c) if c.ends <= now => {
                    let (id, ends) = (c.id, c.ends);
                    self.current = None;
                    self.set_status(id, ItemStatus::Spoken);
                    self.now = ends;
                }
                Some(_) => break,
                None => {
                    if self.paused || !self.start_next() {
                        break;
                    }
                }
            }
        }
        self.now = now;
    }

    /// Runs the queue until nothing is left to say; returns the finish time.
    pub fn drain(&mut self) -> u64 {
        while let Some(c) = &self.current {
            let ends = c.ends;
            self.advance(ends);
            if self.paused {
                break;
            }
        }
        self.now
    }

    /// Starts the head of the queue at `self.now`. Returns false when empty.
    fn start_next(&mut self) -> bool {
        while let Some(p) = self.pending.pop_front() {
            if self.speak(p.id, p.item) {
                return true;
            }
        }
        false
    }

    /// Hands an item to the speaker. A timeout gets one retry; any other
    /// failure, or a second timeout, drops the item.
    fn speak(&mut self, id: u64, item: SpeechItem) -> bool {
        let mut result = self.tts.speak(&item, self.now);
        if matches!(result, Err(ClientError::Timeout(_))) {
            result = self.tts.speak(&item, self.now);
        }
        match result {
            Ok(()) => {
                let ends = self.now + self.pace.duration(&item.text);
                self.set_status(id, ItemStatus::Speaking);
                self.current = Some(Current { id, item, started: self.now, ends });
                true
            }
            Err(e) => {
                tracing::warn!(text = %item.text, "dropping utterance: {e}");
                self.set_status(id, ItemStatus::Dropped);
                false
            }
        }
    }

    fn insert_pending(&mut self, p: Pending) {
        let pos = match p.item.priority {
            Priority::Critical => self.pending.iter().take_while(|q| q.item.priority == Priority::Critical).count(),
            _ => self.pending.len(),
        };
        self.pending.insert(pos, p);
    }

    pub fn submit(&mut self, item: SpeechItem, now: u64) -> QueueEffect {
        self.advance(now);
        if item.text.trim().is_empty() {
            self.record(&item, ItemStatus::Dropped);
            return QueueEffect::Dropped;
        }
        let id = self.record(&item, ItemStatus::Pending);
        if item.priority == Priority::Low {
            let stale: Vec<u64> = self
                .pending
                .iter()
                .filter(|p| p.item.priority == Priority::Low && p.item.origin == item.origin)
                .map(|p| p.id)
                .collect();
            self.pending.retain(|p| !stale.contains(&p.id));
            for s in stale {
                self.set_status(s, ItemStatus::Dropped);
            }
        }
        let critical = item.priority == Priority::Critical;
        if self.paused {
            self.insert_pending(Pending { id, item });
            return QueueEffect::Queued;
        }
        match self.current.take() {
            Some(cur) if critical && cur.item.priority != Priority::Critical => {
                self.tts_interrupt(&cur);
                self.pending.push_front(Pending { id: cur.id, item: cur.item });
                self.set_status(cur.id, ItemStatus::Pending);
                if self.speak(id, item) {
                    QueueEffect::PreemptedCurrent
                } else {
                    self.start_next();
                    QueueEffect::Dropped
                }
            }
            Some(cur) => {
                self.current = Some(cur);
                self.insert_pending(Pending { id, item });
                QueueEffect::Queued
            }
            None => {
                self.insert_pending(Pending { id, item });
                if self.start_next() && self.current.as_ref().is_some_and(|c| c.id == id) {
                    QueueEffect::SpokenNow
                } else if self.pending.iter().any(|p| p.id == id) {
                    QueueEffect::Queued
                } else {
                    QueueEffect::Dropped
                }
            }
        }
    }

    fn tts_interrupt(&self, cur: &Current) {
        tracing::debug!(text = %cur.item.text, started = cur.started, "interrupting utterance");
        self.tts.interrupt();
    }

    /// Halts speech; the interrupted item goes back to the front.
    pub fn pause(&mut self, now: u64) {
        self.advance(now);
        if self.paused {
            return;
        }
        self.paused = true;
        if let Some(cur) = self.current.take() {
            self.tts_interrupt(&cur);
            self.set_status(cur.id, ItemStatus::Pending);
            self.pending.push_front(Pending { id: cur.id, item: cur.item });
        }
    }

    pub fn resume(&mut self, now: u64) {
        self.paused = false;
        self.advance(now);
    }

    /// Re-submits the most recent item that did not come from navigation,
    /// at normal priority.
    pub fn replay_last(&mut self, now: u64) -> Result<(SpeechItem, QueueEffect), QueueError> {
        let item = self
            .history
            .iter()
            .rev()
            .find(|e| e.item.origin != Origin::Navigation && !e.item.text.trim().is_empty())
            .map(|e| e.item.clone())
            .ok_or(QueueError::EmptyHistory)?;
        let item = SpeechItem { priority: Priority::Normal, ..item };
        let effect = self.submit(item.clone(), now);
        Ok((item, effect))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clients::RecordingTts;
    use proptest::prelude::*;

    fn queue() -> (Arc<RecordingTts>, SpeechQueue) {
        let tts = Arc::new(RecordingTts::new());
        (tts.clone(), SpeechQueue::new(tts))
    }

    #[test]
    fn critical_preempts_and_interrupted_item_resumes_first() {
        let (tts, mut q) = queue();
        assert_eq!(q.submit(SpeechItem::normal("A long description of the table.", Origin::Description), 0), QueueEffect::SpokenNow);
        assert_eq!(q.submit(SpeechItem::normal("Next", Origin::Event), 10), QueueEffect::Queued);
        assert_eq!(q.submit(SpeechItem::critical("It is your turn.", Origin::Event), 100), QueueEffect::PreemptedCurrent);
        assert_eq!(q.pending()[0].text, "A long description of the table.");
        q.drain();
        assert_eq!(
            tts.texts(),
            ["A long description of the table.", "It is your turn.", "A long description of the table.", "Next"]
        );
    }

    #[test]
    fn stale_low_items_are_dropped() {
        let (tts, mut q) = queue();
        q.submit(SpeechItem::normal("busy", Origin::Event), 0);
        assert_eq!(q.submit(SpeechItem::low("Red 5", Origin::Navigation), 1), QueueEffect::Queued);
        assert_eq!(q.submit(SpeechItem::low("Green Skip", Origin::Navigation), 2), QueueEffect::Queued);
        assert_eq!(q.pending().len(), 1);
        assert_eq!(q.pending()[0].text, "Green Skip");
        let dropped: Vec<_> = q.history().filter(|e| e.status == ItemStatus::Dropped).map(|e| e.item.text.clone()).collect();
        assert_eq!(dropped, ["Red 5"]);
        q.drain();
        assert_eq!(tts.texts(), ["busy", "Green Skip"]);
    }

    #[test]
    fn paused_queue_holds_items() {
        let (tts, mut q) = queue();
        q.pause(0);
        assert_eq!(q.submit(SpeechItem::normal("one", Origin::Event), 5), QueueEffect::Queued);
        assert_eq!(q.submit(SpeechItem::normal("two", Origin::Event), 6), QueueEffect::Queued);
        q.advance(10_000);
        assert!(tts.texts().is_empty());
        let before: Vec<String> = q.pending().iter().map(|i| i.text.clone()).collect();
        q.resume(10_000);
        assert_eq!(q.current().unwrap().text, "one");
        assert_eq!(before, ["one", "two"]);
        q.drain();
        assert_eq!(tts.texts(), ["one", "two"]);
    }

    #[test]
    fn replay_last_skips_navigation() {
        let (_tts, mut q) = queue();
        assert_eq!(q.replay_last(0), Err(QueueError::EmptyHistory));
        q.submit(SpeechItem::critical("It is your turn.", Origin::Event), 0);
        q.submit(SpeechItem::low("Red 5, Row 1 of 1, Column 1 of 7", Origin::Navigation), 10);
        let (item, _) = q.replay_last(20).unwrap();
        assert_eq!(item.text, "It is your turn.");
        assert_eq!(item.priority, Priority::Normal);
    }

    #[test]
    fn timeout_is_retried_once_then_dropped() {
        let tts = Arc::new(RecordingTts::failing(1));
        let mut q = SpeechQueue::new(tts.clone());
        assert_eq!(q.submit(SpeechItem::normal("retry me", Origin::Event), 0), QueueEffect::SpokenNow);
        let tts = Arc::new(RecordingTts::failing(2));
        let mut q = SpeechQueue::new(tts.clone());
        assert_eq!(q.submit(SpeechItem::normal("lost", Origin::Event), 0), QueueEffect::Dropped);
        assert!(tts.texts().is_empty());
    }

    #[test]
    fn history_is_bounded() {
        let (_tts, mut q) = queue();
        for i in 0..40 {
            q.submit(SpeechItem::normal(format!("n{i}"), Origin::Event), i * 1000);
        }
        assert_eq!(q.history().count(), HISTORY_LEN);
        assert_eq!(q.history().next().unwrap().item.text, "n39");
    }

    proptest! {
        #[test]
        fn critical_and_normal_items_are_all_spoken(
            ops in proptest::collection::vec((0u8..3, 0u64..500), 1..40)
        ) {
            let (tts, mut q) = queue();
            let mut t = 0;
            let mut must_speak = Vec::new();
            for (i, (p, dt)) in ops.iter().enumerate() {
                t += dt;
                let prio = [Priority::Critical, Priority::Normal, Priority::Low][*p as usize];
                let text = format!("item {i}");
                if prio != Priority::Low {
                    must_speak.push(text.clone());
                }
                q.submit(SpeechItem::new(text, prio, Origin::Event), t);
            }
            q.drain();
            let spoken = tts.texts();
            for text in must_speak {
                prop_assert!(spoken.contains(&text), "{text} never spoken");
            }
        }
    }
}
