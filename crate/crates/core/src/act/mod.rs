//! The Act agent: element maps, keyboard grid navigation, mouse
//! exploration, hotkeys and pointer output.

mod backend;
mod cursor;
mod grid;
mod hotkey;
mod hover;
mod merge;

pub use backend::{activate, click_block, click_point, ActionKind, ActionResult, BackendError, NoBackend, OutputBackend};
pub use cursor::{announce, move_cursor, Direction, NavCursor};
pub use grid::{build_grid, NavigationGrid, ROW_TOLERANCE};
pub use hotkey::{dispatch_hotkey, execute_hotkey, Facts, HotkeyContext, HotkeyOutcome};
pub use hover::{hit_test, HoverTracker};
pub use merge::{merge_element_sources, OVERRIDE_IOU};

use crate::describe::{DescribeError, QueueError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ActError {
    #[error("state {0:?} has no interactive elements")]
    NoInteractiveElements(String),
    #[error("{0}")]
    BackendUnavailable(String),
    #[error("hotkey {0:?} needs a block")]
    MissingBlock(String),
    #[error(transparent)]
    Describe(#[from] DescribeError),
    #[error(transparent)]
    Queue(#[from] QueueError),
}
