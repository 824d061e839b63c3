//! R-peak detection with the Pan-Tompkins pipeline: band-pass, five-point
//! derivative, squaring, moving-window integration, adaptive dual thresholds
//! with search-back, then apex refinement on the raw signal.

use crate::error::{Error, Result};
use crate::record::EcgRecord;

/// Detected R-peak sample positions, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RPeakList {
    indices: Vec<usize>,
}

impl RPeakList {
    /// Wraps a caller-supplied index list, enforcing strict ascent.
    pub fn from_indices(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::arg("peak indices must be strictly increasing"));
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
}

impl Biquad {
    /// Band-pass with peak gain 1 at `f0`, bandwidth set by `q`.
    fn bandpass(f0: f64, q: f64, fs: f64) -> Self {
        let w0 = 2.0 * std::f64::consts::PI * f0 / fs;
        let alpha = w0.sin() / (2.0 * q);
        let a0 = 1.0 + alpha;
        Self {
            b0: alpha / a0,
            b1: 0.0,
            b2: -alpha / a0,
            a1: -2.0 * w0.cos() / a0,
            a2: (1.0 - alpha) / a0,
        }
    }

    fn run(&self, x: &[f64]) -> Vec<f64> {
        let mut y = Vec::with_capacity(x.len());
        // Warm-start the state as if the first sample had been flowing in
        // forever, so a DC offset at t=0 does not ring the filter.
        let x0 = x.first().copied().unwrap_or(0.0);
        let mut z1 = -self.b0 * x0;
        let mut z2 = -(self.b0 + self.b1) * x0;
        for &v in x {
            let out = self.b0 * v + z1;
            z1 = self.b1 * v - self.a1 * out + z2;
            z2 = self.b2 * v - self.a2 * out;
            y.push(out);
        }
        y
    }
}

/// 5-15 Hz band-pass (two cascaded biquads centered on sqrt(5*15) Hz).
/// Rejects DC completely; passband ripple keeps 10 Hz above half gain while
/// 50/60 Hz mains lands below 0.05.
pub fn bandpass_5_15(record: &EcgRecord) -> Result<Vec<f64>> {
    let fs = record.sampling_rate;
    if fs < 100.0 {
        return Err(Error::arg(format!(
            "sampling rate {fs} Hz too low for the 5-15 Hz detection band"
        )));
    }
    let f0 = (5.0f64 * 15.0).sqrt();
    let q = f0 / 10.0;
    let stage = Biquad::bandpass(f0, q, fs);
    let x: Vec<f64> = record.samples.iter().map(|&s| f64::from(s)).collect();
    Ok(stage.run(&stage.run(&x)))
}

fn five_point_derivative(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let at = |i: isize| x[i.clamp(0, n as isize - 1) as usize];
    (0..n as isize)
        .map(|i| (2.0 * at(i) + at(i - 1) - at(i - 3) - 2.0 * at(i - 4)) / 8.0)
        .collect()
}

fn moving_window_integral(x: &[f64], width: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut sum = 0.0;
    for i in 0..x.len() {
        sum += x[i];
        if i >= width {
            sum -= x[i - width];
        }
        out.push(sum / width as f64);
    }
    out
}

/// Local maxima of `x` (plateau-left), with values.
fn local_maxima(x: &[f64]) -> Vec<(usize, f64)> {
    let mut peaks = Vec::new();
    for i in 1..x.len().saturating_sub(1) {
        if x[i] > x[i - 1] && x[i] >= x[i + 1] && x[i] > 0.0 {
            peaks.push((i, x[i]));
        }
    }
    peaks
}

/// Steepest observed rise of `x` in `[lo, hi)`, for T-wave discrimination.
fn max_slope(x: &[f64], lo: usize, hi: usize) -> f64 {
    let hi = hi.min(x.len());
    if lo + 1 >= hi {
        return 0.0;
    }
    x[lo..hi]
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::MIN, f64::max)
}

struct Thresholds {
    sig_level: f64,
    noise_level: f64,
}

impl Thresholds {
    fn threshold1(&self) -> f64 {
        self.noise_level + 0.25 * (self.sig_level - self.noise_level)
    }

    fn threshold2(&self) -> f64 {
        0.5 * self.threshold1()
    }

    fn promote_signal(&mut self, v: f64) {
        self.sig_level = 0.125 * v + 0.875 * self.sig_level;
    }

    fn promote_signal_searchback(&mut self, v: f64) {
        self.sig_level = 0.25 * v + 0.75 * self.sig_level;
    }

    fn promote_noise(&mut self, v: f64) {
        self.noise_level = 0.125 * v + 0.875 * self.noise_level;
    }
}

/// Detects R peaks. Returns an empty list when nothing crosses threshold
/// (flat or zero input); errors only when the record is shorter than the
/// two-second threshold seeding window.
pub fn detect_r_peaks(record: &EcgRecord) -> Result<RPeakList> {
    let fs = record.sampling_rate;
    let n = record.len();
    let seed_window = (2.0 * fs).round() as usize;
    if n < seed_window {
        return Err(Error::arg(format!(
            "record too short for QRS detection: {n} samples < 2 s at {fs} Hz"
        )));
    }

    let filtered = bandpass_5_15(record)?;
    let derivative = five_point_derivative(&filtered);
    let squared: Vec<f64> = derivative.iter().map(|v| v * v).collect();
    let mwi_width = (0.150 * fs).round() as usize;
    let mwi = moving_window_integral(&squared, mwi_width.max(1));

    let refractory = (0.200 * fs).round() as usize;
    let t_wave_window = (0.360 * fs).round() as usize;
    let slope_lookback = (0.075 * fs).round() as usize;

    let mut thr = {
        let head = &mwi[..seed_window.min(mwi.len())];
        let max = head.iter().copied().fold(0.0f64, f64::max);
        let mean = head.iter().sum::<f64>() / head.len() as f64;
        Thresholds {
            sig_level: max / 3.0,
            noise_level: mean / 2.0,
        }
    };

    let candidates = local_maxima(&mwi);
    let mut qrs_mwi: Vec<usize> = Vec::new(); // peak positions on the MWI signal
    let mut qrs_slopes: Vec<f64> = Vec::new();
    let mut rr_intervals: Vec<usize> = Vec::new();
    let mut pending_noise: Vec<(usize, f64)> = Vec::new(); // since last QRS, for search-back

    let accept = |loc: usize,
                      qrs_mwi: &mut Vec<usize>,
                      qrs_slopes: &mut Vec<f64>,
                      rr_intervals: &mut Vec<usize>| {
        if let Some(&prev) = qrs_mwi.last() {
            rr_intervals.push(loc - prev);
            if rr_intervals.len() > 8 {
                rr_intervals.remove(0);
            }
        }
        qrs_slopes.push(max_slope(&mwi, loc.saturating_sub(slope_lookback), loc + 1));
        qrs_mwi.push(loc);
    };

    for &(loc, value) in &candidates {
        if let Some(&prev) = qrs_mwi.last() {
            if loc - prev < refractory {
                continue;
            }
        }

        // Search-back: if the expected beat window elapsed without a QRS,
        // re-examine skipped candidates against the lower threshold.
        if !rr_intervals.is_empty() {
            let rr_avg = rr_intervals.iter().sum::<usize>() as f64 / rr_intervals.len() as f64;
            let last = *qrs_mwi.last().unwrap();
            if (loc - last) as f64 > 1.66 * rr_avg {
                let found = pending_noise
                    .iter()
                    .filter(|(l, v)| l > &(last + refractory) && *v > thr.threshold2())
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .copied();
                if let Some((sb_loc, sb_value)) = found {
                    thr.promote_signal_searchback(sb_value);
                    accept(sb_loc, &mut qrs_mwi, &mut qrs_slopes, &mut rr_intervals);
                    pending_noise.clear();
                    if loc - sb_loc < refractory {
                        continue;
                    }
                }
            }
        }

        if value > thr.threshold1() {
            // T-wave discrimination: a shallow candidate close behind the
            // previous QRS is the T wave, not a new beat.
            if let (Some(&prev), Some(&prev_slope)) = (qrs_mwi.last(), qrs_slopes.last()) {
                if loc - prev < t_wave_window {
                    let slope = max_slope(&mwi, loc.saturating_sub(slope_lookback), loc + 1);
                    if slope < 0.5 * prev_slope {
                        thr.promote_noise(value);
                        pending_noise.push((loc, value));
                        continue;
                    }
                }
            }
            thr.promote_signal(value);
            accept(loc, &mut qrs_mwi, &mut qrs_slopes, &mut rr_intervals);
            pending_noise.clear();
        } else {
            thr.promote_noise(value);
            pending_noise.push((loc, value));
        }
    }

    // Map MWI peaks back to raw-signal apexes: first undo the integration
    // lag on the filtered signal, then snap to the raw extremum within 50 ms.
    let mean = record.mean();
    let snap = (0.050 * fs).round() as usize;
    let mut indices: Vec<usize> = qrs_mwi
        .iter()
        .map(|&loc| {
            let lo = loc.saturating_sub(mwi_width);
            let hi = (loc + 1).min(n);
            let filt_apex = (lo..hi)
                .max_by(|&a, &b| filtered[a].abs().total_cmp(&filtered[b].abs()))
                .unwrap_or(loc);
            let lo = filt_apex.saturating_sub(snap);
            let hi = (filt_apex + snap + 1).min(n);
            (lo..hi)
                .max_by(|&a, &b| {
                    let da = (f64::from(record.samples[a]) - mean).abs();
                    let db = (f64::from(record.samples[b]) - mean).abs();
                    da.total_cmp(&db)
                })
                .unwrap_or(filt_apex)
        })
        .collect();

    // Snapping can collapse neighbours; re-impose strict ascent + refractory.
    indices.sort_unstable();
    indices.dedup();
    let mut cleaned: Vec<usize> = Vec::with_capacity(indices.len());
    for idx in indices {
        match cleaned.last() {
            Some(&prev) if idx - prev < refractory => {}
            _ => cleaned.push(idx),
        }
    }

    RPeakList::from_indices(cleaned)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(samples: Vec<i32>, fs: f64) -> EcgRecord {
        EcgRecord::new(samples, fs, 11, "test").unwrap()
    }

    fn sine(freq: f64, fs: f64, seconds: f64, amplitude: f64) -> Vec<i32> {
        let n = (seconds * fs) as usize;
        (0..n)
            .map(|i| {
                (amplitude * (2.0 * std::f64::consts::PI * freq * i as f64 / fs).sin()).round()
                    as i32
            })
            .collect()
    }

    /// Steady-state output amplitude after the filter transient.
    fn steady_amplitude(y: &[f64], fs: f64) -> f64 {
        let skip = (2.0 * fs) as usize;
        y[skip..].iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    #[test]
    fn bandpass_rejects_dc() {
        let rec = record(vec![1000; 3600], 360.0);
        let y = bandpass_5_15(&rec).unwrap();
        assert!(steady_amplitude(&y, 360.0) < 1e-6 * 1000.0);
    }

    #[test]
    fn bandpass_passes_10_hz() {
        let rec = record(sine(10.0, 360.0, 10.0, 1000.0), 360.0);
        let y = bandpass_5_15(&rec).unwrap();
        assert!(steady_amplitude(&y, 360.0) >= 0.5 * 1000.0);
    }

    #[test]
    fn bandpass_attenuates_60_hz() {
        let rec = record(sine(60.0, 360.0, 10.0, 1000.0), 360.0);
        let y = bandpass_5_15(&rec).unwrap();
        assert!(steady_amplitude(&y, 360.0) <= 0.2 * 1000.0);
    }

    #[test]
    fn bandpass_preserves_length() {
        let rec = record(sine(10.0, 500.0, 3.0, 100.0), 500.0);
        assert_eq!(bandpass_5_15(&rec).unwrap().len(), rec.len());
    }

    #[test]
    fn bandpass_rejects_low_rate() {
        let rec = record(vec![0; 500], 50.0);
        assert!(bandpass_5_15(&rec).is_err());
    }

    use crate::testutil::pulse_train;

    #[test]
    fn flat_signal_yields_no_peaks() {
        let rec = record(vec![0; 7200], 360.0);
        assert!(detect_r_peaks(&rec).unwrap().is_empty());
        let rec = record(vec![512; 7200], 360.0);
        assert!(detect_r_peaks(&rec).unwrap().is_empty());
    }

    #[test]
    fn too_short_record_rejected() {
        let rec = record(vec![0; 100], 360.0);
        assert!(detect_r_peaks(&rec).is_err());
    }

    #[test]
    fn detects_uniform_pulse_train_exactly() {
        let (samples, apexes) = pulse_train(360.0, 30.0, 300, false);
        let rec = record(samples, 360.0);
        let peaks = detect_r_peaks(&rec).unwrap();
        assert_eq!(peaks.len(), apexes.len(), "detected {:?}", peaks.indices());
        for (&got, &want) in peaks.indices().iter().zip(&apexes) {
            assert!(
                got.abs_diff(want) <= 18,
                "peak {got} too far from apex {want}"
            );
        }
    }

    #[test]
    fn adaptive_threshold_keeps_small_beats() {
        let (samples, apexes) = pulse_train(360.0, 30.0, 300, true);
        let rec = record(samples, 360.0);
        let peaks = detect_r_peaks(&rec).unwrap();
        assert_eq!(peaks.len(), apexes.len());
        for (&got, &want) in peaks.indices().iter().zip(&apexes) {
            assert!(got.abs_diff(want) <= 18);
        }
    }

    #[test]
    fn detection_invariant_to_amplitude_scaling() {
        let (samples, _) = pulse_train(360.0, 20.0, 320, true);
        let doubled: Vec<i32> = samples.iter().map(|&s| s * 2).collect();
        let a = detect_r_peaks(&record(samples, 360.0)).unwrap();
        let b = detect_r_peaks(&record(doubled, 360.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn refractory_spacing_holds() {
        let (samples, _) = pulse_train(360.0, 30.0, 300, false);
        let rec = record(samples, 360.0);
        let peaks = detect_r_peaks(&rec).unwrap();
        let refractory = (0.2 * 360.0) as usize;
        for w in peaks.indices().windows(2) {
            assert!(w[1] - w[0] >= refractory);
        }
    }

    #[test]
    fn from_indices_requires_strict_ascent() {
        assert!(RPeakList::from_indices(vec![3, 3]).is_err());
        assert!(RPeakList::from_indices(vec![5, 2]).is_err());
        assert!(RPeakList::from_indices(vec![1, 2, 9]).is_ok());
    }
}
