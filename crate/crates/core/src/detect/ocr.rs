use serde::{Deserialize, Serialize};

use crate::clients::{ClientError, Clients};
use crate::config::{denormalize, NormalizedBlock};
use crate::frames::Frame;

/// Text read from the screen, located in full-frame coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextDetection {
    pub text: String,
    pub block: NormalizedBlock,
    pub confidence: f64,
    pub timestamp_ms: u64,
}

/// Runs OCR on `region` of `frame` and maps the boxes back into the frame.
/// Empty strings and degenerate boxes are dropped.
pub fn ocr_region(frame: &Frame, region: &NormalizedBlock, clients: &Clients) -> Result<Vec<TextDetection>, ClientError> {
    let (fw, fh) = frame.dimensions();
    let rect = denormalize(region, fw, fh);
    let crop = frame.crop_rect(rect);
    let items = clients.call_ocr(&crop.encode_png())?;
    let (w, h) = (f64::from(fw), f64::from(fh));
    Ok(items
        .into_iter()
        .filter(|i| !i.text.trim().is_empty())
        .filter_map(|i| {
            let [x1, y1, x2, y2] = i.bbox;
            let block = NormalizedBlock::new(
                ((f64::from(rect.left) + x1) / w).clamp(0.0, 1.0),
                ((f64::from(rect.top) + y1) / h).clamp(0.0, 1.0),
                ((f64::from(rect.left) + x2) / w).clamp(0.0, 1.0),
                ((f64::from(rect.top) + y2) / h).clamp(0.0, 1.0),
            )
            .ok()?;
            Some(TextDetection {
                text: i.text,
                block,
                confidence: i.conf.clamp(0.0, 1.0),
                timestamp_ms: frame.timestamp_ms,
            })
        })
        .collect())
}
