use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rustfft::num_complex::Complex;

use serde::{Deserialize, Serialize};

use super::ncc::{FftCache, ImageSpectrum, PreparedTemplate};
use crate::config::{denormalize, NormalizedBlock, PixelRect};
use crate::exec::Execution;
use crate::frames::Frame;

/// A template found in a frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemDetection {
    pub template_name: String,
    pub block: NormalizedBlock,
    pub score: f64,
    pub timestamp_ms: u64,
}

type Spectra = Arc<Vec<Option<Vec<Complex<f64>>>>>;

/// Template set prepared once and reused across frames. Template spectra
/// are kept per search-area size.
#[derive(Debug)]
pub struct TemplateMatcher {
    templates: Vec<(String, PreparedTemplate)>,
    cache: FftCache,
    spectra: Mutex<HashMap<(usize, usize), Spectra>>,
    exec: Execution,
}

impl TemplateMatcher {
    pub fn new<'a>(templates: impl IntoIterator<Item = (&'a String, &'a Frame)>, exec: Execution) -> Self {
        let templates = templates
            .into_iter()
            .map(|(name, img)| (name.clone(), PreparedTemplate::from_frame(img)))
            .collect();
        TemplateMatcher { templates, cache: FftCache::default(), spectra: Mutex::default(), exec }
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    /// All local maxima scoring at least `tau`, greedily suppressed where two
    /// boxes overlap with IoU above `nms_iou`, best first.
    pub fn find(&self, frame: &Frame, tau: f64, search: Option<&NormalizedBlock>, nms_iou: f64) -> Vec<ItemDetection> {
        if self.templates.is_empty() {
            return Vec::new();
        }
        let (fw, fh) = frame.dimensions();
        let area = match search {
            Some(b) => denormalize(b, fw, fh),
            None => PixelRect::new(0, 0, fw, fh),
        };
        let luma = frame.luma().sub(
            area.left as usize,
            area.top as usize,
            area.width() as usize,
            area.height() as usize,
        );
        let spectrum = ImageSpectrum::new(&luma, &self.cache);
        let spectra = self.spectra_for(&spectrum);
        let pairs: Vec<usize> = (0..self.templates.len()).step_by(2).collect();
        let per_pair = self.exec.map(&pairs, |&i| {
            let batch: Vec<(&PreparedTemplate, Option<&[Complex<f64>]>)> = (i..(i + 2).min(self.templates.len()))
                .map(|j| (&self.templates[j].1, spectra[j].as_deref()))
                .collect();
            let maps = spectrum.score_maps(&batch);
            let mut found = Vec::new();
            for (j, map) in (i..).zip(maps) {
                let Some(map) = map else { continue };
                let (name, tpl) = &self.templates[j];
                found.extend(map.local_maxima(tau).into_iter().filter_map(|(x, y, score)| {
                    let rect = PixelRect::new(
                        area.left + x as u32,
                        area.top + y as u32,
                        area.left + (x + tpl.width) as u32,
                        area.top + (y + tpl.height) as u32,
                    );
                    let block = NormalizedBlock::from_pixels(rect, fw, fh).ok()?;
                    Some(ItemDetection { template_name: name.clone(), block, score, timestamp_ms: frame.timestamp_ms })
                }));
            }
            found
        });
        let mut candidates: Vec<ItemDetection> = per_pair.into_iter().flatten().collect();
        candidates.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.template_name.cmp(&b.template_name))
                .then_with(|| a.block.y1().total_cmp(&b.block.y1()))
                .then_with(|| a.block.x1().total_cmp(&b.block.x1()))
        });
        let mut kept: Vec<ItemDetection> = Vec::new();
        for c in candidates {
            if kept.iter().all(|k| k.block.iou(&c.block) <= nms_iou) {
                kept.push(c);
            }
        }
        kept
    }
}

impl TemplateMatcher {
    fn spectra_for(&self, spectrum: &ImageSpectrum) -> Spectra {
        let key = (spectrum.width(), spectrum.height());
        if let Some(s) = self.spectra.lock().expect("spectra cache").get(&key) {
            return s.clone();
        }
        let computed: Spectra = Arc::new(self.exec.map(&self.templates, |(_, t)| spectrum.template_spectrum(t)));
        self.spectra.lock().expect("spectra cache").entry(key).or_insert(computed).clone()
    }
}

/// One-shot template matching with the default NMS overlap of 0.3.
pub fn match_templates(
    frame: &Frame,
    templates: &BTreeMap<String, Frame>,
    tau: f64,
    search: Option<&NormalizedBlock>,
) -> Vec<ItemDetection> {
    TemplateMatcher::new(templates, Execution::default()).find(frame, tau, search, 0.3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tile(seed: u64, w: u32, h: u32) -> Frame {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Frame::from_fn(w, h, |_, _| [rng.random(), rng.random(), rng.random()])
    }

    fn paste(dst: &mut Frame, src: &Frame, ox: u32, oy: u32) {
        for y in 0..src.height() {
            for x in 0..src.width() {
                dst.put_pixel(ox + x, oy + y, src.pixel(x, y));
            }
        }
    }

    #[test]
    fn empty_frame_has_no_detections() {
        let mut t = BTreeMap::new();
        t.insert("a".to_string(), random_tile(1, 12, 16));
        let frame = Frame::solid(120, 80, [30, 90, 30]);
        assert!(match_templates(&frame, &t, 0.85, None).is_empty());
    }

    #[test]
    fn adjacent_copies_both_kept() {
        let tile = random_tile(2, 10, 14);
        let mut frame = Frame::solid(100, 50, [0, 0, 0]);
        paste(&mut frame, &tile, 20, 10);
        paste(&mut frame, &tile, 30, 10);
        let mut t = BTreeMap::new();
        t.insert("x".to_string(), tile);
        let found = match_templates(&frame, &t, 0.85, None);
        assert_eq!(found.len(), 2);
        assert!(found.iter().all(|d| d.template_name == "x" && d.score > 0.999));
    }

    #[test]
    fn distinct_templates_found_by_name() {
        let a = random_tile(3, 12, 12);
        let b = random_tile(4, 12, 12);
        let mut frame = Frame::solid(80, 40, [200, 200, 200]);
        paste(&mut frame, &a, 5, 5);
        paste(&mut frame, &b, 50, 20);
        let mut t = BTreeMap::new();
        t.insert("a".to_string(), a);
        t.insert("b".to_string(), b);
        let found = match_templates(&frame, &t, 0.85, None);
        let mut names: Vec<_> = found.iter().map(|d| d.template_name.as_str()).collect();
        names.sort();
        assert_eq!(names, ["a", "b"]);
    }

    #[test]
    fn search_block_restricts_and_offsets() {
        let tile = random_tile(5, 8, 8);
        let mut frame = Frame::solid(100, 100, [10, 10, 10]);
        paste(&mut frame, &tile, 10, 10);
        paste(&mut frame, &tile, 60, 70);
        let mut t = BTreeMap::new();
        t.insert("t".to_string(), tile);
        let search = NormalizedBlock::new(0.5, 0.5, 1.0, 1.0).unwrap();
        let found = match_templates(&frame, &t, 0.85, Some(&search));
        assert_eq!(found.len(), 1);
        let r = denormalize(&found[0].block, 100, 100);
        assert_eq!((r.left, r.top, r.right, r.bottom), (60, 70, 68, 78));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let tile = random_tile(6, 9, 9);
        let mut frame = Frame::solid(90, 60, [50, 60, 70]);
        paste(&mut frame, &tile, 3, 40);
        let mut t = BTreeMap::new();
        t.insert("t".to_string(), tile);
        t.insert("u".to_string(), random_tile(7, 9, 9));
        let seq = TemplateMatcher::new(&t, Execution::Sequential).find(&frame, 0.5, None, 0.3);
        let par = TemplateMatcher::new(&t, Execution::Parallel).find(&frame, 0.5, None, 0.3);
        assert_eq!(seq, par);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn known_offset_recovered(seed in 0u64..1000, ox in 0u32..50, oy in 0u32..30) {
            let tile = random_tile(seed, 11, 13);
            let mut frame = Frame::solid(64, 48, [128, 128, 128]);
            paste(&mut frame, &tile, ox, oy);
            let mut t = BTreeMap::new();
            t.insert("t".to_string(), tile);
            let found = match_templates(&frame, &t, 0.85, None);
            proptest::prop_assert!(!found.is_empty());
            let r = denormalize(&found[0].block, 64, 48);
            proptest::prop_assert!(r.left.abs_diff(ox) <= 1 && r.top.abs_diff(oy) <= 1);
            proptest::prop_assert!(r.right.abs_diff(ox + 11) <= 1 && r.bottom.abs_diff(oy + 13) <= 1);
        }
    }
}
