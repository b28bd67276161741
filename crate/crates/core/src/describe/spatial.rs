use serde::{Deserialize, Serialize};

use crate::config::{NormalizedBlock, SpatialConfig};

/// Stereo placement of an utterance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialAudioParams {
    pub gain_left: f64,
    pub gain_right: f64,
    /// Semitones; positive for the top of the screen.
    pub pitch_shift: f64,
    pub onset_delay: f64,
}

impl Default for SpatialAudioParams {
    /// Centred, no pitch or delay.
    fn default() -> Self {
        SpatialAudioParams { gain_left: 0.5f64.sqrt(), gain_right: 0.5f64.sqrt(), pitch_shift: 0.0, onset_delay: 0.0 }
    }
}

/// Constant-power pan with a compressive exponent, pitch and onset delay
/// from the vertical position.
pub fn spatial_params_with(block: &NormalizedBlock, cfg: &SpatialConfig) -> SpatialAudioParams {
    let (cx, cy) = block.center();
    spatial_at(cx, cy, cfg)
}

pub fn spatial_params(block: &NormalizedBlock) -> SpatialAudioParams {
    spatial_params_with(block, &SpatialConfig::default())
}

pub fn spatial_at(cx: f64, cy: f64, cfg: &SpatialConfig) -> SpatialAudioParams {
    let p = (2.0 * cx - 1.0).clamp(-1.0, 1.0);
    let shaped = p.signum() * p.abs().powf(cfg.pan_exponent);
    SpatialAudioParams {
        gain_left: ((1.0 - shaped) / 2.0).max(0.0).sqrt(),
        gain_right: ((1.0 + shaped) / 2.0).max(0.0).sqrt(),
        pitch_shift: cfg.max_pitch_semitones * (1.0 - 2.0 * cy),
        onset_delay: cfg.max_delay_ms * cy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn at(cx: f64, cy: f64) -> SpatialAudioParams {
        spatial_at(cx, cy, &SpatialConfig::default())
    }

    #[test]
    fn centre() {
        let s = spatial_params(&NormalizedBlock::new(0.4, 0.4, 0.6, 0.6).unwrap());
        assert!((s.gain_left - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((s.gain_right - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(s.pitch_shift.abs() < 1e-12);
        assert!((s.onset_delay - 15.0).abs() < 1e-12);
    }

    #[test]
    fn top_right_corner() {
        let s = at(1.0, 0.0);
        assert!(s.gain_left.abs() < 1e-12 && (s.gain_right - 1.0).abs() < 1e-12);
        assert!((s.pitch_shift - 4.0).abs() < 1e-12);
        assert_eq!(s.onset_delay, 0.0);
    }

    #[test]
    fn lower_left_quarter() {
        // p = -0.5, p' = -(0.5^0.6); gains sqrt((1 -+ p') / 2).
        let s = at(0.25, 0.75);
        let shaped = -(0.5f64.powf(0.6));
        assert!((shaped + 0.6598).abs() < 1e-4);
        assert!((s.gain_left - ((1.0 - shaped) / 2.0).sqrt()).abs() < 1e-12);
        assert!((s.gain_left - 0.9110).abs() < 1e-4);
        assert!((s.gain_right - 0.4124).abs() < 1e-4);
        assert!((s.pitch_shift + 2.0).abs() < 1e-12);
        assert!((s.onset_delay - 22.5).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn power_is_conserved(x1 in 0.0f64..0.99, y1 in 0.0f64..0.99, w in 0.001f64..1.0, h in 0.001f64..1.0) {
            let b = NormalizedBlock::new(x1, y1, (x1 + w).min(1.0), (y1 + h).min(1.0)).unwrap();
            let s = spatial_params(&b);
            prop_assert!((s.gain_left.powi(2) + s.gain_right.powi(2) - 1.0).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn pan_is_monotone(a in 0.0f64..=1.0, b in 0.0f64..=1.0, cy in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (l, r) = (at(lo, cy), at(hi, cy));
            prop_assert!(r.gain_right >= l.gain_right - 1e-15);
            prop_assert!(r.gain_left <= l.gain_left + 1e-15);
        }
    }
}
