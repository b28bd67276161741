//! The Detect agent: cue-based state classification, template matching for
//! items, OCR text integration and temporal debouncing.

mod classify;
mod debounce;
mod matcher;
pub mod ncc;
mod ocr;

pub use classify::{classify_state, CueClassifier, StateClassification, StateClassifier};
pub use debounce::{Debouncer, DetectionEvent, EventKind, EventPayload, Sightings};
pub use matcher::{match_templates, ItemDetection, TemplateMatcher};
pub use ncc::ncc_score;
pub use ocr::{ocr_region, TextDetection};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DetectError {
    #[error("template {template:?} does not fit in image {image:?} at offset {at:?}")]
    TemplateTooLarge { template: (u32, u32), image: (u32, u32), at: (u32, u32) },
}
