//! Zero-mean normalized cross-correlation.
//!
//! Scores lie in [-1, 1]. A window (or template) with no variance scores 0.
//! Dense score maps are computed as an FFT cross-correlation for the
//! numerator and summed-area tables for the window energies.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::DetectError;
use crate::frames::{Frame, LumaPlane};

/// Per-pixel variance below which a window counts as constant.
const MIN_VARIANCE: f64 = 1e-6;

/// Template luma with its mean removed, ready for correlation.
#[derive(Debug, Clone)]
pub struct PreparedTemplate {
    pub width: usize,
    pub height: usize,
    zero_mean: Vec<f64>,
    norm: f64,
}

impl PreparedTemplate {
    pub fn new(plane: &LumaPlane) -> Self {
        let n = plane.data.len() as f64;
        let mean = plane.data.iter().sum::<f64>() / n;
        let zero_mean: Vec<f64> = plane.data.iter().map(|v| v - mean).collect();
        let energy: f64 = zero_mean.iter().map(|v| v * v).sum();
        let norm = if energy / n < MIN_VARIANCE { 0.0 } else { energy.sqrt() };
        PreparedTemplate { width: plane.width, height: plane.height, zero_mean, norm }
    }

    pub fn from_frame(frame: &Frame) -> Self {
        Self::new(&frame.luma())
    }

    pub fn is_flat(&self) -> bool {
        self.norm == 0.0
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }
}

/// NCC of `template` against the window of `image` whose top-left corner is
/// at `(x, y)`, computed directly.
pub fn ncc_at(image: &LumaPlane, template: &PreparedTemplate, x: usize, y: usize) -> f64 {
    let (w, h) = (template.width, template.height);
    let n = (w * h) as f64;
    let mut sum = 0.0;
    for yy in 0..h {
        sum += image.row(y + yy)[x..x + w].iter().sum::<f64>();
    }
    let mean = sum / n;
    let mut cross = 0.0;
    let mut energy = 0.0;
    for yy in 0..h {
        let row = &image.row(y + yy)[x..x + w];
        let trow = &template.zero_mean[yy * w..(yy + 1) * w];
        for (a, t) in row.iter().zip(trow) {
            let d = a - mean;
            cross += d * t;
            energy += d * d;
        }
    }
    if template.is_flat() || energy / n < MIN_VARIANCE {
        return 0.0;
    }
    (cross / (energy.sqrt() * template.norm)).clamp(-1.0, 1.0)
}

/// Zero-mean NCC between `template` and the region of `image` at pixel
/// offset `at`.
pub fn ncc_score(image: &Frame, template: &Frame, at: (u32, u32)) -> Result<f64, DetectError> {
    let (x, y) = at;
    if x.saturating_add(template.width()) > image.width() || y.saturating_add(template.height()) > image.height() {
        return Err(DetectError::TemplateTooLarge {
            template: template.dimensions(),
            image: image.dimensions(),
            at,
        });
    }
    let region = image.luma().sub(x as usize, y as usize, template.width() as usize, template.height() as usize);
    Ok(ncc_at(&region, &PreparedTemplate::from_frame(template), 0, 0))
}

/// Dense NCC scores for every placement of a template inside an image.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMap {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl ScoreMap {
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Best score and its position; first in raster order on ties.
    pub fn argmax(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &v) in self.data.iter().enumerate() {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        best.map(|(i, v)| (i % self.width, i / self.width, v))
    }

    /// Positions that are 8-neighbourhood maxima with score >= `threshold`.
    /// On plateaus only the first position in raster order is kept.
    pub fn local_maxima(&self, threshold: f64) -> Vec<(usize, usize, f64)> {
        let (w, h) = (self.width as isize, self.height as isize);
        let mut out = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let v = self.data[(y * w + x) as usize];
                if v < threshold {
                    continue;
                }
                let mut is_max = true;
                'nb: for dy in -1..=1isize {
                    for dx in -1..=1isize {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let (nx, ny) = (x + dx, y + dy);
                        if nx < 0 || ny < 0 || nx >= w || ny >= h {
                            continue;
                        }
                        let nv = self.data[(ny * w + nx) as usize];
                        let earlier = dy < 0 || (dy == 0 && dx < 0);
                        if nv > v || (earlier && nv == v) {
                            is_max = false;
                            break 'nb;
                        }
                    }
                }
                if is_max {
                    out.push((x as usize, y as usize, v));
                }
            }
        }
        out
    }
}

/// Summed-area tables of an image and its square, for window energies.
#[derive(Debug, Clone)]
pub struct WindowSums {
    width: usize,
    sum: Vec<f64>,
    sq: Vec<f64>,
}

impl WindowSums {
    pub fn new(image: &LumaPlane) -> Self {
        let (w, h) = (image.width, image.height);
        let stride = w + 1;
        let mut sum = vec![0.0; stride * (h + 1)];
        let mut sq = vec![0.0; stride * (h + 1)];
        for y in 0..h {
            let mut rs = 0.0;
            let mut rq = 0.0;
            for x in 0..w {
                let v = image.data[y * w + x];
                rs += v;
                rq += v * v;
                sum[(y + 1) * stride + x + 1] = sum[y * stride + x + 1] + rs;
                sq[(y + 1) * stride + x + 1] = sq[y * stride + x + 1] + rq;
            }
        }
        WindowSums { width: w, sum, sq }
    }

    /// Sum of squared deviations from the mean over the `w` x `h` window at
    /// `(x, y)`.
    #[inline]
    pub fn centered_energy(&self, x: usize, y: usize, w: usize, h: usize) -> f64 {
        let s = self.width + 1;
        let rect = |t: &[f64]| t[(y + h) * s + x + w] - t[y * s + x + w] - t[(y + h) * s + x] + t[y * s + x];
        let n = (w * h) as f64;
        let total = rect(&self.sum);
        (rect(&self.sq) - total * total / n).max(0.0)
    }
}

struct Plans {
    row_fwd: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

/// Cache of FFT plans keyed by image size. Shared across threads.
#[derive(Default)]
pub struct FftCache {
    plans: Mutex<HashMap<(usize, usize), Arc<Plans>>>,
}

impl std::fmt::Debug for FftCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftCache").finish_non_exhaustive()
    }
}

impl FftCache {
    fn get(&self, w: usize, h: usize) -> Arc<Plans> {
        let mut guard = self.plans.lock().expect("fft plan cache poisoned");
        guard
            .entry((w, h))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(Plans {
                    row_fwd: planner.plan_fft_forward(w),
                    col_fwd: planner.plan_fft_forward(h),
                    row_inv: planner.plan_fft_inverse(w),
                    col_inv: planner.plan_fft_inverse(h),
                })
            })
            .clone()
    }
}

/// Reciprocal window norms for one template size.
type NormMap = Arc<Vec<f64>>;

/// Image spectrum, stored column-major (`w` columns of length `h`).
pub struct ImageSpectrum {
    width: usize,
    height: usize,
    data: Vec<Complex<f64>>,
    sums: WindowSums,
    plans: Arc<Plans>,
    /// Reciprocal window norms per template size; 0 where the window is flat.
    inv_norms: Mutex<HashMap<(usize, usize), NormMap>>,
}

impl ImageSpectrum {
    pub fn new(image: &LumaPlane, cache: &FftCache) -> Self {
        let (w, h) = (image.width, image.height);
        let mean = image.data.iter().sum::<f64>() / image.data.len() as f64;
        let centered = LumaPlane::new(w, h, image.data.iter().map(|v| v - mean).collect());
        let plans = cache.get(w, h);
        let data = forward(&centered.data, w, h, h, &plans);
        ImageSpectrum { width: w, height: h, data, sums: WindowSums::new(&centered), plans, inv_norms: Mutex::default() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Spectrum of `template` zero-padded to the image size. `None` when the
    /// template does not fit or is flat. Depends only on the image size, so
    /// callers may reuse it across frames of equal size.
    pub fn template_spectrum(&self, template: &PreparedTemplate) -> Option<Vec<Complex<f64>>> {
        let (w, h) = (self.width, self.height);
        let (tw, th) = (template.width, template.height);
        if tw > w || th > h || template.is_flat() {
            return None;
        }
        let mut padded = vec![0.0; w * th];
        for y in 0..th {
            padded[y * w..y * w + tw].copy_from_slice(&template.zero_mean[y * tw..(y + 1) * tw]);
        }
        padded.resize(w * h, 0.0);
        Some(forward(&padded, w, h, th, &self.plans))
    }

    /// Dense NCC map of `template` over the image. `None` when the template
    /// does not fit.
    pub fn score_map(&self, template: &PreparedTemplate) -> Option<ScoreMap> {
        let spectrum = self.template_spectrum(template);
        self.score_maps(&[(template, spectrum.as_deref())]).pop().flatten()
    }

    /// Score maps for several templates with precomputed spectra (from
    /// [`ImageSpectrum::template_spectrum`] on an image of the same size).
    /// Both correlations are real, so templates are inverted in pairs as the
    /// real and imaginary parts of one transform.
    pub fn score_maps(&self, templates: &[(&PreparedTemplate, Option<&[Complex<f64>]>)]) -> Vec<Option<ScoreMap>> {
        let mut out = Vec::with_capacity(templates.len());
        let mut pending: Vec<(&PreparedTemplate, &[Complex<f64>])> = Vec::with_capacity(2);
        let flush = |pending: &mut Vec<(&PreparedTemplate, &[Complex<f64>])>, out: &mut Vec<Option<ScoreMap>>| {
            if pending.is_empty() {
                return;
            }
            let rows = self.correlate(pending);
            for (i, (t, _)) in pending.iter().enumerate() {
                out.push(Some(self.normalize(t, &rows, i)));
            }
            pending.clear();
        };
        for &(t, spectrum) in templates {
            let (w, h) = (self.width, self.height);
            match spectrum {
                _ if t.width > w || t.height > h => {
                    flush(&mut pending, &mut out);
                    out.push(None);
                }
                Some(spec) => {
                    pending.push((t, spec));
                    if pending.len() == 2 {
                        flush(&mut pending, &mut out);
                    }
                }
                None => {
                    flush(&mut pending, &mut out);
                    let (mw, mh) = (w - t.width + 1, h - t.height + 1);
                    out.push(Some(ScoreMap { width: mw, height: mh, data: vec![0.0; mw * mh] }));
                }
            }
        }
        flush(&mut pending, &mut out);
        out
    }

    /// Unscaled cross-correlation rows for one or two templates: the first
    /// in the real part, the second in the imaginary part.
    fn correlate(&self, templates: &[(&PreparedTemplate, &[Complex<f64>])]) -> Vec<Complex<f64>> {
        let (w, h) = (self.width, self.height);
        let i = Complex::new(0.0, 1.0);
        let mut prod: Vec<Complex<f64>> = match templates {
            [(_, a)] => self.data.iter().zip(*a).map(|(f, t)| f * t.conj()).collect(),
            [(_, a), (_, b)] => self.data.iter().zip(a.iter().zip(*b)).map(|(f, (ta, tb))| f * ta.conj() + i * f * tb.conj()).collect(),
            _ => unreachable!("one or two templates per transform"),
        };
        let mh = templates.iter().map(|(t, _)| h - t.height + 1).max().expect("non-empty");
        // Inverse: columns first (data is column-major), then rows we need.
        self.plans.col_inv.process(&mut prod);
        let mut rows = vec![Complex::new(0.0, 0.0); w * mh];
        for x in 0..w {
            for y in 0..mh {
                rows[y * w + x] = prod[x * h + y];
            }
        }
        self.plans.row_inv.process(&mut rows);
        rows
    }

    fn inv_norms(&self, tw: usize, th: usize) -> Arc<Vec<f64>> {
        if let Some(m) = self.inv_norms.lock().expect("norm cache").get(&(tw, th)) {
            return m.clone();
        }
        let (mw, mh) = (self.width - tw + 1, self.height - th + 1);
        let n = (tw * th) as f64;
        let mut map = Vec::with_capacity(mw * mh);
        for y in 0..mh {
            for x in 0..mw {
                let energy = self.sums.centered_energy(x, y, tw, th);
                map.push(if energy / n < MIN_VARIANCE { 0.0 } else { 1.0 / energy.sqrt() });
            }
        }
        self.inv_norms.lock().expect("norm cache").entry((tw, th)).or_insert(Arc::new(map)).clone()
    }

    fn normalize(&self, template: &PreparedTemplate, rows: &[Complex<f64>], part: usize) -> ScoreMap {
        let w = self.width;
        let (tw, th) = (template.width, template.height);
        let (mw, mh) = (w - tw + 1, self.height - th + 1);
        let inv = self.inv_norms(tw, th);
        let scale = 1.0 / ((w * self.height) as f64 * template.norm);
        let mut data = Vec::with_capacity(mw * mh);
        for y in 0..mh {
            let row = &rows[y * w..y * w + mw];
            let inv_row = &inv[y * mw..(y + 1) * mw];
            for (c, k) in row.iter().zip(inv_row) {
                let cross = if part == 0 { c.re } else { c.im };
                data.push((cross * scale * k).clamp(-1.0, 1.0));
            }
        }
        ScoreMap { width: mw, height: mh, data }
    }
}

fn forward(real: &[f64], w: usize, h: usize, nonzero_rows: usize, plans: &Plans) -> Vec<Complex<f64>> {
    let mut rows: Vec<Complex<f64>> = real[..w * nonzero_rows].iter().map(|&v| Complex::new(v, 0.0)).collect();
    plans.row_fwd.process(&mut rows);
    let mut cols = vec![Complex::new(0.0, 0.0); w * h];
    for y in 0..nonzero_rows {
        for x in 0..w {
            cols[x * h + y] = rows[y * w + x];
        }
    }
    plans.col_fwd.process(&mut cols);
    cols
}

/// Dense NCC map computed window by window. Used for small searches.
pub fn score_map_direct(image: &LumaPlane, template: &PreparedTemplate) -> Option<ScoreMap> {
    if template.width > image.width || template.height > image.height {
        return None;
    }
    let (mw, mh) = (image.width - template.width + 1, image.height - template.height + 1);
    let mut data = Vec::with_capacity(mw * mh);
    for y in 0..mh {
        for x in 0..mw {
            data.push(ncc_at(image, template, x, y));
        }
    }
    Some(ScoreMap { width: mw, height: mh, data })
}

/// Picks the direct or FFT route by estimated cost.
pub fn score_map(image: &LumaPlane, template: &PreparedTemplate, cache: &FftCache) -> Option<ScoreMap> {
    if template.width > image.width || template.height > image.height {
        return None;
    }
    let positions = (image.width - template.width + 1) * (image.height - template.height + 1);
    if positions * template.area() <= 64 * image.width * image.height {
        score_map_direct(image, template)
    } else {
        ImageSpectrum::new(image, cache).score_map(template)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_frame(rng: &mut ChaCha8Rng, w: u32, h: u32) -> Frame {
        Frame::from_fn(w, h, |_, _| [rng.random(), rng.random(), rng.random()])
    }

    /// Textbook NCC straight from the definition, on luma computed here.
    fn oracle(image: &Frame, template: &Frame, ox: u32, oy: u32) -> f64 {
        let luma = |p: [u8; 3]| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64;
        let (w, h) = template.dimensions();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for y in 0..h {
            for x in 0..w {
                a.push(luma(image.pixel(ox + x, oy + y)));
                b.push(luma(template.pixel(x, y)));
            }
        }
        let ma = a.iter().sum::<f64>() / a.len() as f64;
        let mb = b.iter().sum::<f64>() / b.len() as f64;
        let mut num = 0.0;
        let mut da = 0.0;
        let mut db = 0.0;
        for i in 0..a.len() {
            num += (a[i] - ma) * (b[i] - mb);
            da += (a[i] - ma).powi(2);
            db += (b[i] - mb).powi(2);
        }
        if da == 0.0 || db == 0.0 {
            0.0
        } else {
            num / (da * db).sqrt()
        }
    }

    #[test]
    fn self_match_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let img = random_frame(&mut rng, 20, 20);
        let tpl = img.crop_rect(crate::config::PixelRect::new(5, 6, 13, 14));
        assert!((ncc_score(&img, &tpl, (5, 6)).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn negative_is_minus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let tpl = random_frame(&mut rng, 8, 8);
        let mut neg = tpl.clone();
        neg.pixels_mut().iter_mut().for_each(|p| *p = 255 - *p);
        assert!((ncc_score(&neg, &tpl, (0, 0)).unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn flat_region_scores_zero() {
        let img = Frame::solid(10, 10, [80, 80, 80]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tpl = random_frame(&mut rng, 4, 4);
        assert_eq!(ncc_score(&img, &tpl, (2, 2)).unwrap(), 0.0);
        assert_eq!(ncc_score(&tpl, &Frame::solid(4, 4, [1, 2, 3]), (0, 0)).unwrap(), 0.0);
    }

    #[test]
    fn too_large_template_errors() {
        let img = Frame::solid(10, 10, [0, 0, 0]);
        let tpl = Frame::solid(4, 4, [0, 0, 0]);
        assert!(matches!(ncc_score(&img, &tpl, (7, 0)), Err(DetectError::TemplateTooLarge { .. })));
    }

    #[test]
    fn random_8x8_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let img = random_frame(&mut rng, 16, 16);
            let tpl = random_frame(&mut rng, 8, 8);
            let (x, y) = (rng.random_range(0..=8), rng.random_range(0..=8));
            let got = ncc_score(&img, &tpl, (x, y)).unwrap();
            assert!((got - oracle(&img, &tpl, x, y)).abs() < 1e-9);
        }
    }

    #[test]
    fn fft_map_agrees_with_direct_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let img = random_frame(&mut rng, 40, 27).luma();
        let tpl = PreparedTemplate::new(&random_frame(&mut rng, 9, 6).luma());
        let cache = FftCache::default();
        let fast = ImageSpectrum::new(&img, &cache).score_map(&tpl).unwrap();
        let slow = score_map_direct(&img, &tpl).unwrap();
        assert_eq!((fast.width, fast.height), (slow.width, slow.height));
        for (a, b) in fast.data.iter().zip(&slow.data) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn paired_maps_equal_single_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let img = random_frame(&mut rng, 33, 21).luma();
        let spectrum = ImageSpectrum::new(&img, &FftCache::default());
        let tpls: Vec<PreparedTemplate> = [(5, 4), (7, 9), (4, 4)]
            .iter()
            .map(|&(w, h)| PreparedTemplate::new(&random_frame(&mut rng, w, h).luma()))
            .chain([PreparedTemplate::new(&Frame::solid(3, 3, [9, 9, 9]).luma())])
            .collect();
        let specs: Vec<Option<Vec<Complex<f64>>>> = tpls.iter().map(|t| spectrum.template_spectrum(t)).collect();
        let batch: Vec<(&PreparedTemplate, Option<&[Complex<f64>]>)> =
            tpls.iter().zip(&specs).map(|(t, s)| (t, s.as_deref())).collect();
        let paired = spectrum.score_maps(&batch);
        assert_eq!(paired.len(), 4);
        for (t, got) in tpls.iter().zip(paired) {
            let (got, want) = (got.unwrap(), score_map_direct(&img, t).unwrap());
            assert_eq!((got.width, got.height), (want.width, want.height));
            for (a, b) in got.data.iter().zip(&want.data) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn plateau_yields_single_maximum() {
        let map = ScoreMap { width: 3, height: 1, data: vec![0.9, 0.9, 0.1] };
        assert_eq!(map.local_maxima(0.5), vec![(0, 0, 0.9)]);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        #[test]
        fn direct_matches_oracle_on_32x32(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let img = random_frame(&mut rng, 32, 32);
            let tw = rng.random_range(1..=32);
            let th = rng.random_range(1..=32);
            let tpl = random_frame(&mut rng, tw, th);
            let x = rng.random_range(0..=32 - tw);
            let y = rng.random_range(0..=32 - th);
            let got = ncc_score(&img, &tpl, (x, y)).unwrap();
            proptest::prop_assert!((got - oracle(&img, &tpl, x, y)).abs() < 1e-9);
        }
    }
}
