//! Accessibility runtime for 2D non-twitch games.
//!
//! The crate is organized around three cooperating agents driven by a
//! per-game configuration bundle:
//!
//! * [`detect`] classifies the game state from visual cues, recognizes items
//!   by template matching, reads text through an OCR client and debounces the
//!   raw sightings into [`detect::DetectionEvent`]s.
//! * [`describe`] measures frame-to-frame change, routes it to silence, brief
//!   or rich narration, caches VLM descriptions and owns the speech queue.
//! * [`act`] turns element maps into a keyboard navigation grid, hit-tests
//!   mouse exploration and dispatches context-gated hotkeys.
//!
//! [`orchestrator`] wires them into a session, [`harness`] provides
//! deterministic simulated games with ground truth, and [`clients`] holds the
//! wire protocol for the external services together with offline mocks.

pub mod act;
pub mod clients;
pub mod config;
pub mod describe;
pub mod detect;
pub mod exec;
pub mod frames;
pub mod harness;
pub mod hash;
pub mod orchestrator;

pub use config::{GameConfig, NormalizedBlock};
pub use exec::Execution;
pub use frames::Frame;
