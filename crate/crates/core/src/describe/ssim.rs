//! Mean structural similarity with the standard 11x11 Gaussian window
//! (sigma 1.5), evaluated at every position where the window fits.

use crate::exec::Execution;
use crate::frames::{Frame, LumaPlane};

pub const WINDOW: usize = 11;
pub const SIGMA: f64 = 1.5;
const C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SsimError {
    #[error("frames differ in size: {0:?} vs {1:?}")]
    DimensionMismatch((u32, u32), (u32, u32)),
    #[error("frame {0:?} is smaller than the 11x11 window")]
    TooSmall((u32, u32)),
}

/// Normalized 1D Gaussian taps.
pub fn gaussian_kernel() -> [f64; WINDOW] {
    let mut k = [0.0; WINDOW];
    let c = (WINDOW / 2) as f64;
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-(d * d) / (2.0 * SIGMA * SIGMA)).exp();
    }
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

pub fn ssim_mean(a: &Frame, b: &Frame) -> Result<f64, SsimError> {
    ssim_mean_with(a, b, Execution::default())
}

pub fn ssim_mean_with(a: &Frame, b: &Frame, exec: Execution) -> Result<f64, SsimError> {
    if a.dimensions() != b.dimensions() {
        return Err(SsimError::DimensionMismatch(a.dimensions(), b.dimensions()));
    }
    let (w, h) = a.dimensions();
    if (w as usize) < WINDOW || (h as usize) < WINDOW {
        return Err(SsimError::TooSmall(a.dimensions()));
    }
    Ok(ssim_planes(&a.luma(), &b.luma(), exec))
}

/// SSIM of two luma planes of equal size (at least 11x11).
pub fn ssim_planes(a: &LumaPlane, b: &LumaPlane, exec: Execution) -> f64 {
    let k = gaussian_kernel();
    let (w, h) = (a.width, a.height);
    let (ow, oh) = (w - WINDOW + 1, h - WINDOW + 1);

    // Horizontal pass over every row: five moments per output column.
    let horiz: Vec<[Vec<f64>; 5]> = exec.map_range(h, |y| {
        let ra = a.row(y);
        let rb = b.row(y);
        let mut out: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; ow]);
        for x in 0..ow {
            let mut m = [0.0; 5];
            for (i, &g) in k.iter().enumerate() {
                let (p, q) = (ra[x + i], rb[x + i]);
                m[0] += g * p;
                m[1] += g * q;
                m[2] += g * p * p;
                m[3] += g * q * q;
                m[4] += g * p * q;
            }
            for j in 0..5 {
                out[j][x] = m[j];
            }
        }
        out
    });

    // Vertical pass and the SSIM formula, summed per output row.
    let row_sums: Vec<f64> = exec.map_range(oh, |y| {
        let mut total = 0.0;
        for x in 0..ow {
            let mut m = [0.0; 5];
            for (i, &g) in k.iter().enumerate() {
                let r = &horiz[y + i];
                for j in 0..5 {
                    m[j] += g * r[j][x];
                }
            }
            let [mu_a, mu_b, e_aa, e_bb, e_ab] = m;
            let var_a = e_aa - mu_a * mu_a;
            let var_b = e_bb - mu_b * mu_b;
            let cov = e_ab - mu_a * mu_b;
            total += ((2.0 * mu_a * mu_b + C1) * (2.0 * cov + C2))
                / ((mu_a * mu_a + mu_b * mu_b + C1) * (var_a + var_b + C2));
        }
        total
    });
    row_sums.iter().sum::<f64>() / (ow * oh) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Reference SSIM: a full 2D Gaussian window at each position, with
    /// explicitly mean-subtracted variances and covariance.
    fn oracle(a: &Frame, b: &Frame) -> f64 {
        let (la, lb) = (a.luma(), b.luma());
        let n = 11usize;
        let mut g2 = vec![0.0; n * n];
        let mut s = 0.0;
        for y in 0..n {
            for x in 0..n {
                let (dx, dy) = (x as f64 - 5.0, y as f64 - 5.0);
                g2[y * n + x] = (-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5)).exp();
                s += g2[y * n + x];
            }
        }
        g2.iter_mut().for_each(|v| *v /= s);
        let c1 = (0.01f64 * 255.0).powi(2);
        let c2 = (0.03f64 * 255.0).powi(2);
        let (w, h) = (la.width, la.height);
        let mut total = 0.0;
        let mut count = 0usize;
        for oy in 0..=h - n {
            for ox in 0..=w - n {
                let (mut ma, mut mb) = (0.0, 0.0);
                for y in 0..n {
                    for x in 0..n {
                        ma += g2[y * n + x] * la.at(ox + x, oy + y);
                        mb += g2[y * n + x] * lb.at(ox + x, oy + y);
                    }
                }
                let (mut va, mut vb, mut cab) = (0.0, 0.0, 0.0);
                for y in 0..n {
                    for x in 0..n {
                        let da = la.at(ox + x, oy + y) - ma;
                        let db = lb.at(ox + x, oy + y) - mb;
                        va += g2[y * n + x] * da * da;
                        vb += g2[y * n + x] * db * db;
                        cab += g2[y * n + x] * da * db;
                    }
                }
                total += ((2.0 * ma * mb + c1) * (2.0 * cab + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
                count += 1;
            }
        }
        total / count as f64
    }

    fn random(seed: u64, w: u32, h: u32) -> Frame {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Frame::from_fn(w, h, |_, _| [rng.random(), rng.random(), rng.random()])
    }

    #[test]
    fn identical_is_one() {
        let f = random(1, 40, 30);
        assert!((ssim_mean(&f, &f).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn negative_matches_oracle() {
        // Gradient with no mid-grey so the negative is a distinct image.
        let f = Frame::from_fn(48, 32, |x, y| {
            let v = ((x * 5 + y * 3) % 100) as u8;
            [v, v, v]
        });
        let mut neg = f.clone();
        neg.pixels_mut().iter_mut().for_each(|p| *p = 255 - *p);
        let got = ssim_mean(&f, &neg).unwrap();
        assert!((got - oracle(&f, &neg)).abs() < 1e-6);
        assert!(got < 0.2);
    }

    #[test]
    fn random_pair_matches_oracle() {
        let (a, b) = (random(2, 64, 64), random(3, 64, 64));
        assert!((ssim_mean(&a, &b).unwrap() - oracle(&a, &b)).abs() < 1e-6);
    }

    #[test]
    fn errors() {
        let a = Frame::solid(20, 20, [0, 0, 0]);
        assert!(matches!(ssim_mean(&a, &Frame::solid(21, 20, [0, 0, 0])), Err(SsimError::DimensionMismatch(..))));
        let t = Frame::solid(10, 30, [0, 0, 0]);
        assert!(matches!(ssim_mean(&t, &t), Err(SsimError::TooSmall(_))));
    }

    #[test]
    fn execution_strategies_agree() {
        let (a, b) = (random(4, 70, 50), random(5, 70, 50));
        let s = ssim_mean_with(&a, &b, Execution::Sequential).unwrap();
        let p = ssim_mean_with(&a, &b, Execution::Parallel).unwrap();
        assert_eq!(s, p);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn symmetric_and_reflexive(seed in 0u64..10_000, w in 11u32..40, h in 11u32..40) {
            let a = random(seed, w, h);
            let b = random(seed + 1, w, h);
            proptest::prop_assert!((ssim_mean(&a, &a).unwrap() - 1.0).abs() < 1e-9);
            proptest::prop_assert!((ssim_mean(&a, &b).unwrap() - ssim_mean(&b, &a).unwrap()).abs() < 1e-9);
        }
    }
}
