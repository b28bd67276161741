use serde::{Deserialize, Serialize};

use super::ssim::{ssim_planes, SsimError, WINDOW};
use crate::config::ChangeConfig;
use crate::exec::Execution;
use crate::frames::Frame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Silent,
    Brief,
    Rich,
}

/// Route for a dissimilarity `delta`: `[0, t1)` silent, `[t1, t2)` brief,
/// `[t2, 1]` rich.
pub fn route_for(delta: f64, threshold1: f64, threshold2: f64) -> Route {
    if delta < threshold1 {
        Route::Silent
    } else if delta < threshold2 {
        Route::Brief
    } else {
        Route::Rich
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeAssessment {
    pub delta: f64,
    pub route: Route,
    /// Per monitored block, in configuration order. Empty when the whole
    /// frame was compared.
    pub regions: Vec<(String, f64)>,
}

/// `1 - SSIM`, clamped to `[0, 1]`.
pub fn frame_delta(prev: &Frame, cur: &Frame, exec: Execution) -> Result<f64, SsimError> {
    if prev.dimensions() != cur.dimensions() {
        return Err(SsimError::DimensionMismatch(prev.dimensions(), cur.dimensions()));
    }
    let (w, h) = prev.dimensions();
    if (w as usize) < WINDOW || (h as usize) < WINDOW {
        return Err(SsimError::TooSmall(prev.dimensions()));
    }
    Ok((1.0 - ssim_planes(&prev.luma(), &cur.luma(), exec)).clamp(0.0, 1.0))
}

/// Measures the change between two frames and routes it. With monitored
/// blocks the largest per-block change wins.
pub fn assess_change(prev: &Frame, cur: &Frame, cfg: &ChangeConfig, exec: Execution) -> Result<ChangeAssessment, SsimError> {
    let (delta, regions) = if cfg.blocks.is_empty() {
        (frame_delta(prev, cur, exec)?, Vec::new())
    } else {
        if prev.dimensions() != cur.dimensions() {
            return Err(SsimError::DimensionMismatch(prev.dimensions(), cur.dimensions()));
        }
        let mut regions = Vec::with_capacity(cfg.blocks.len());
        for m in &cfg.blocks {
            regions.push((m.id.clone(), frame_delta(&prev.crop(&m.block), &cur.crop(&m.block), exec)?));
        }
        let max = regions.iter().map(|r| r.1).fold(0.0, f64::max);
        (max, regions)
    };
    Ok(ChangeAssessment { delta, route: route_for(delta, cfg.threshold1, cfg.threshold2), regions })
}
