//! The Describe agent: change measurement and routing, rich descriptions
//! with caching, brief event narration, spatial audio and the speech queue.

mod cache;
mod change;
mod feedback;
mod queue;
mod spatial;
pub mod ssim;

pub use cache::{CacheIoError, DescriptionCache};
pub use change::{assess_change, frame_delta, route_for, ChangeAssessment, Route};
pub use feedback::{
    ask_question, brief_feedback, describe_rich, item_label, DescribeError, Description, DescriptionSource,
    DEFAULT_QUESTION_PROMPT,
};
pub use queue::{
    HistoryEntry, ItemStatus, Origin, Pace, Priority, QueueEffect, QueueError, SpeechItem, SpeechQueue, HISTORY_LEN,
};
pub use spatial::{spatial_at, spatial_params, spatial_params_with, SpatialAudioParams};
pub use ssim::{ssim_mean, SsimError};
