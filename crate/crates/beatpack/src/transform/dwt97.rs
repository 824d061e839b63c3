//! CDF 9/7 biorthogonal wavelet transform via lifting.
//!
//! Whole-sample symmetric extension at both ends of every lifting step, so
//! any length >= 2 (odd included) reconstructs perfectly. Coefficients are
//! laid out as `[approx_L | detail_L | ... | detail_1]`.

use crate::error::{Error, Result};

// Standard cdf97 lifting constants.
const ALPHA: f64 = -1.586_134_342_069_364_8;
const BETA: f64 = -0.052_980_118_571_885_6;
const GAMMA: f64 = 0.882_911_075_541_187_5;
const DELTA: f64 = 0.443_506_852_051_114_2;
const ZETA: f64 = 1.149_604_398_860_241_8;

/// Subband layout for a forward transform of a given length and depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveletPlan {
    pub signal_length: usize,
    /// Effective decomposition depth after clamping.
    pub levels: usize,
    /// Partition of `[0, signal_length)` into `levels + 1` segments:
    /// `bounds[0] = 0`, `bounds[levels + 1] = signal_length`. Segment 0 is
    /// the deepest approximation band, segment k >= 1 is detail level
    /// `levels + 1 - k`.
    pub subband_bounds: Vec<usize>,
}

impl WaveletPlan {
    /// Builds the plan, clamping `levels` when the signal is too short:
    /// a signal of length `L < 2^levels` is decomposed into
    /// `max(1, floor(log2(L)) - 1)` levels instead.
    pub fn new(signal_length: usize, levels: usize) -> Result<Self> {
        if signal_length < 2 {
            return Err(Error::arg(format!(
                "wavelet transform needs at least 2 samples, got {signal_length}"
            )));
        }
        if levels == 0 {
            return Err(Error::arg("wavelet levels must be >= 1"));
        }
        let effective = clamp_levels(signal_length, levels);
        let mut bounds = Vec::with_capacity(effective + 2);
        let mut lengths = Vec::with_capacity(effective);
        let mut n = signal_length;
        for _ in 0..effective {
            lengths.push(n);
            n = n.div_ceil(2);
        }
        // Deepest approximation first, then details from deepest to level 1.
        bounds.push(0);
        bounds.push(n);
        let mut acc = n;
        for &len in lengths.iter().rev() {
            acc += len / 2;
            bounds.push(acc);
        }
        debug_assert_eq!(acc, signal_length);
        Ok(Self {
            signal_length,
            levels: effective,
            subband_bounds: bounds,
        })
    }

    /// Length of the deepest approximation band.
    pub fn approx_len(&self) -> usize {
        self.subband_bounds[1]
    }

    fn validate(&self, coeffs_len: usize) -> Result<()> {
        let rebuilt = WaveletPlan::new(self.signal_length, self.levels.max(1))?;
        if rebuilt != *self || coeffs_len != self.signal_length {
            return Err(Error::arg(format!(
                "wavelet plan inconsistent with coefficient vector of length {coeffs_len}"
            )));
        }
        Ok(())
    }
}

fn clamp_levels(len: usize, requested: usize) -> usize {
    if len >= (1usize << requested.min(usize::BITS as usize - 1)) {
        return requested;
    }
    let max_supported = (usize::BITS - 1 - len.leading_zeros()) as usize; // floor(log2(len))
    max_supported.saturating_sub(1).max(1).min(requested)
}

fn lift(x: &mut [f64], coef: f64, odd: bool) {
    let n = x.len();
    let start = if odd { 1 } else { 0 };
    let mut i = start;
    while i < n {
        let left = if i == 0 { x[1] } else { x[i - 1] };
        let right = if i + 1 >= n { x[n - 2] } else { x[i + 1] };
        x[i] += coef * (left + right);
        i += 2;
    }
}

/// One analysis stage in place, then split even/odd into `[approx | detail]`.
fn analyze_once(x: &mut [f64], scratch: &mut Vec<f64>) {
    lift(x, ALPHA, true);
    lift(x, BETA, false);
    lift(x, GAMMA, true);
    lift(x, DELTA, false);
    let n = x.len();
    let half = n.div_ceil(2);
    scratch.clear();
    scratch.extend_from_slice(x);
    for i in 0..half {
        x[i] = scratch[2 * i] * ZETA;
    }
    for i in 0..n / 2 {
        x[half + i] = scratch[2 * i + 1] / ZETA;
    }
}

/// Inverse of `analyze_once`: interleave `[approx | detail]`, then unlift.
fn synthesize_once(x: &mut [f64], scratch: &mut Vec<f64>) {
    let n = x.len();
    let half = n.div_ceil(2);
    scratch.clear();
    scratch.extend_from_slice(x);
    for i in 0..half {
        x[2 * i] = scratch[i] / ZETA;
    }
    for i in 0..n / 2 {
        x[2 * i + 1] = scratch[half + i] * ZETA;
    }
    lift(x, -DELTA, false);
    lift(x, -GAMMA, true);
    lift(x, -BETA, false);
    lift(x, -ALPHA, true);
}

/// Forward cdf97 DWT. Returns the coefficient vector and its plan.
pub fn dwt97_forward(signal: &[f64], levels: usize) -> Result<(Vec<f64>, WaveletPlan)> {
    let plan = WaveletPlan::new(signal.len(), levels)?;
    let mut out = signal.to_vec();
    let mut scratch = Vec::with_capacity(signal.len());
    let mut cur = signal.len();
    for _ in 0..plan.levels {
        analyze_once(&mut out[..cur], &mut scratch);
        cur = cur.div_ceil(2);
    }
    Ok((out, plan))
}

/// Inverse cdf97 DWT; exact inverse of [`dwt97_forward`] up to round-off.
pub fn dwt97_inverse(coeffs: &[f64], plan: &WaveletPlan) -> Result<Vec<f64>> {
    plan.validate(coeffs.len())?;
    let mut out = coeffs.to_vec();
    let mut scratch = Vec::with_capacity(coeffs.len());
    // Segment lengths at each level, shallowest first.
    let mut lengths = Vec::with_capacity(plan.levels);
    let mut n = plan.signal_length;
    for _ in 0..plan.levels {
        lengths.push(n);
        n = n.div_ceil(2);
    }
    for &len in lengths.iter().rev() {
        synthesize_once(&mut out[..len], &mut scratch);
    }
    Ok(out)
}

/// Forward transform reusing an existing plan; the caller guarantees the
/// signal length matches. Used for row batches that share one plan.
pub(crate) fn dwt97_forward_with_plan(signal: &mut [f64], plan: &WaveletPlan) {
    debug_assert_eq!(signal.len(), plan.signal_length);
    let mut scratch = Vec::with_capacity(signal.len());
    let mut cur = signal.len();
    for _ in 0..plan.levels {
        analyze_once(&mut signal[..cur], &mut scratch);
        cur = cur.div_ceil(2);
    }
}

pub(crate) fn dwt97_inverse_with_plan(coeffs: &mut [f64], plan: &WaveletPlan) {
    debug_assert_eq!(coeffs.len(), plan.signal_length);
    let mut scratch = Vec::with_capacity(coeffs.len());
    let mut lengths = Vec::with_capacity(plan.levels);
    let mut n = plan.signal_length;
    for _ in 0..plan.levels {
        lengths.push(n);
        n = n.div_ceil(2);
    }
    for &len in lengths.iter().rev() {
        synthesize_once(&mut coeffs[..len], &mut scratch);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Published cdf97 analysis filter bank, lowpass normalized to unit DC
    // gain. The lifting output equals sqrt(2) * lowpass at even phase and
    // (1/sqrt(2)) * highpass at odd phase.
    const ANALYSIS_LO: [f64; 9] = [
        0.026_748_757_410_810_264,
        -0.016_864_118_442_874_448,
        -0.078_223_266_528_987_85,
        0.266_864_118_442_872_3,
        0.602_949_018_236_357_9,
        0.266_864_118_442_872_3,
        -0.078_223_266_528_987_85,
        -0.016_864_118_442_874_448,
        0.026_748_757_410_810_264,
    ];
    const ANALYSIS_HI: [f64; 7] = [
        0.091_271_763_114_249_48,
        -0.057_543_526_228_499_57,
        -0.591_271_763_114_247_0,
        1.115_087_052_456_994,
        -0.591_271_763_114_247_0,
        -0.057_543_526_228_499_57,
        0.091_271_763_114_249_48,
    ];

    fn sym_ext(x: &[f64], idx: isize) -> f64 {
        let n = x.len() as isize;
        let mut i = idx;
        while i < 0 || i >= n {
            if i < 0 {
                i = -i;
            }
            if i >= n {
                i = 2 * (n - 1) - i;
            }
        }
        x[i as usize]
    }

    /// Single-level analysis by direct convolution with the published taps.
    fn conv_oracle(x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = x.len();
        let sqrt2 = std::f64::consts::SQRT_2;
        let approx: Vec<f64> = (0..n.div_ceil(2))
            .map(|k| {
                let s: f64 = ANALYSIS_LO
                    .iter()
                    .enumerate()
                    .map(|(j, &h)| h * sym_ext(x, 2 * k as isize + j as isize - 4))
                    .sum();
                s * sqrt2
            })
            .collect();
        let detail: Vec<f64> = (0..n / 2)
            .map(|k| {
                let s: f64 = ANALYSIS_HI
                    .iter()
                    .enumerate()
                    .map(|(j, &g)| g * sym_ext(x, 2 * k as isize + 1 + j as isize - 3))
                    .sum();
                s / sqrt2
            })
            .collect();
        (approx, detail)
    }

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        assert_eq!(a.len(), b.len());
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn single_level_matches_convolution_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for &n in &[32usize, 16, 17, 31, 48, 359] {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-100.0..100.0)).collect();
            let (coeffs, plan) = dwt97_forward(&x, 1).unwrap();
            let (approx, detail) = conv_oracle(&x);
            let half = plan.approx_len();
            assert_eq!(half, approx.len());
            assert!(max_abs_diff(&coeffs[..half], &approx) < 1e-8, "approx n={n}");
            assert!(max_abs_diff(&coeffs[half..], &detail) < 1e-8, "detail n={n}");
        }
    }

    #[test]
    fn impulse_in_approx_band_matches_synthesis_oracle() {
        // One unit approximation coefficient inverts to the corresponding
        // synthesis basis vector. Verify against the convolution oracle via
        // biorthogonality: <analysis row k, synthesis vector> = delta.
        let n = 24usize;
        let plan = WaveletPlan::new(n, 1).unwrap();
        for k in [0usize, 3, 11] {
            let mut coeffs = vec![0.0; n];
            coeffs[k] = 1.0;
            let basis = dwt97_inverse(&coeffs, &plan).unwrap();
            let (approx, detail) = conv_oracle(&basis);
            for (i, &a) in approx.iter().enumerate() {
                let expect = if i == k { 1.0 } else { 0.0 };
                assert!((a - expect).abs() < 1e-8, "approx[{i}] vs e_{k}");
            }
            for &d in &detail {
                assert!(d.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn constant_signal_has_vanishing_details() {
        let x = vec![3.5; 16];
        let (coeffs, plan) = dwt97_forward(&x, 3).unwrap();
        for &d in &coeffs[plan.approx_len()..] {
            assert!(d.abs() < 1e-9);
        }
    }

    #[test]
    fn linear_ramp_has_vanishing_interior_details() {
        // Symmetric extension creases a ramp at the edges, so only details
        // whose filter support stays inside the signal must vanish.
        let x: Vec<f64> = (0..64).map(|i| 2.0 * i as f64 - 5.0).collect();
        let (coeffs, plan) = dwt97_forward(&x, 1).unwrap();
        let details = &coeffs[plan.approx_len()..];
        for (k, &d) in details.iter().enumerate().take(details.len() - 3).skip(3) {
            assert!(d.abs() < 1e-9, "detail[{k}] = {d}");
        }
    }

    #[test]
    fn round_trip_all_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..=130usize {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let (coeffs, plan) = dwt97_forward(&x, 6).unwrap();
            let back = dwt97_inverse(&coeffs, &plan).unwrap();
            let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            assert!(max_abs_diff(&x, &back) / scale < 1e-9, "n={n}");
        }
    }

    #[test]
    fn round_trip_odd_length_two_levels() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x: Vec<f64> = (0..17).map(|_| rng.random_range(-10.0..10.0)).collect();
        let (coeffs, plan) = dwt97_forward(&x, 2).unwrap();
        assert_eq!(plan.levels, 2);
        let back = dwt97_inverse(&coeffs, &plan).unwrap();
        assert!(max_abs_diff(&x, &back) < 1e-9);
    }

    #[test]
    fn zero_coeffs_invert_to_zero() {
        let plan = WaveletPlan::new(40, 3).unwrap();
        let back = dwt97_inverse(&vec![0.0; 40], &plan).unwrap();
        assert!(back.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn empty_and_too_short_signals_rejected() {
        assert!(dwt97_forward(&[], 1).is_err());
        assert!(dwt97_forward(&[1.0], 1).is_err());
        assert!(dwt97_forward(&[1.0, 2.0], 0).is_err());
    }

    #[test]
    fn level_clamping_only_kicks_in_when_needed() {
        // Long enough: requested levels preserved.
        let plan = WaveletPlan::new(64, 6).unwrap();
        assert_eq!(plan.levels, 6);
        // Too short: clamped to floor(log2(L)) - 1.
        let plan = WaveletPlan::new(40, 6).unwrap();
        assert_eq!(plan.levels, 4); // floor(log2(40)) = 5
        let plan = WaveletPlan::new(2, 6).unwrap();
        assert_eq!(plan.levels, 1);
        let plan = WaveletPlan::new(3, 2).unwrap();
        assert_eq!(plan.levels, 1);
    }

    #[test]
    fn inconsistent_plan_rejected() {
        let (coeffs, plan) = dwt97_forward(&vec![1.0; 32], 2).unwrap();
        let mut bad = plan.clone();
        bad.signal_length = 31;
        assert!(dwt97_inverse(&coeffs, &bad).is_err());
        let mut bad = plan.clone();
        bad.subband_bounds[1] += 1;
        assert!(dwt97_inverse(&coeffs, &bad).is_err());
        assert!(dwt97_inverse(&coeffs[..31], &plan).is_err());
    }

    #[test]
    fn subband_bounds_partition_signal() {
        for (n, lv) in [(359usize, 6usize), (17, 2), (1000, 6), (5, 1)] {
            let plan = WaveletPlan::new(n, lv).unwrap();
            assert_eq!(plan.subband_bounds[0], 0);
            assert_eq!(*plan.subband_bounds.last().unwrap(), n);
            assert!(plan.subband_bounds.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(plan.subband_bounds.len(), plan.levels + 2);
        }
    }
}
