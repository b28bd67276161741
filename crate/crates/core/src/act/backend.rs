use serde::{Deserialize, Serialize};

use super::grid::NavigationGrid;
use super::{ActError, NavCursor};
use crate::config::{denormalize, Element, NormalizedBlock};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("output backend unavailable: {0}")]
pub struct BackendError(pub String);

/// Synthetic input sink: the simulator in tests, an OS adapter in deployment.
pub trait OutputBackend: Send + Sync {
    fn click(&self, x: u32, y: u32) -> Result<(), BackendError>;
    fn key(&self, sequence: &str) -> Result<(), BackendError>;
}

/// Backend that refuses everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoBackend;

impl OutputBackend for NoBackend {
    fn click(&self, _: u32, _: u32) -> Result<(), BackendError> {
        Err(BackendError("no output backend attached".into()))
    }

    fn key(&self, _: &str) -> Result<(), BackendError> {
        Err(BackendError("no output backend attached".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Clicked,
    Announced,
    NoOp,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionResult {
    pub kind: ActionKind,
    pub target: Option<Element>,
    pub point: Option<(u32, u32)>,
}

/// Centre pixel of a block on a `width` x `height` frame.
pub fn click_point(block: &NormalizedBlock, width: u32, height: u32) -> (u32, u32) {
    denormalize(block, width, height).center()
}

pub fn click_block(
    block: &NormalizedBlock,
    frame_size: (u32, u32),
    backend: &dyn OutputBackend,
) -> Result<(u32, u32), ActError> {
    let (x, y) = click_point(block, frame_size.0, frame_size.1);
    backend.click(x, y).map_err(|e| ActError::BackendUnavailable(e.0))?;
    Ok((x, y))
}

/// Clicks the centre of the element under the cursor.
pub fn activate(
    grid: &NavigationGrid,
    cursor: NavCursor,
    frame_size: (u32, u32),
    backend: &dyn OutputBackend,
) -> Result<ActionResult, ActError> {
    let Some(el) = grid.get(cursor.r, cursor.c) else {
        return Ok(ActionResult { kind: ActionKind::NoOp, target: None, point: None });
    };
    let point = click_block(&el.block, frame_size, backend)?;
    Ok(ActionResult { kind: ActionKind::Clicked, target: Some(el.clone()), point: Some(point) })
}
