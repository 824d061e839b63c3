//! Shared helpers for unit tests.

/// Ricker pulse train: QRS-like spikes with known apex positions.
/// Returns the samples and the apex index of each pulse.
pub(crate) fn pulse_train(
    fs: f64,
    seconds: f64,
    period: usize,
    scale_every_other: bool,
) -> (Vec<i32>, Vec<usize>) {
    let n = (seconds * fs) as usize;
    let sigma = 0.025 * fs;
    let half = (3.0 * sigma) as isize;
    let mut signal = vec![0f64; n];
    let mut apexes = Vec::new();
    let mut center = period / 2;
    let mut k = 0usize;
    while center + (half as usize) < n {
        let amp = if scale_every_other && k % 2 == 1 { 600.0 } else { 1000.0 };
        for off in -half..=half {
            let idx = center as isize + off;
            if idx >= 0 && (idx as usize) < n {
                let t = off as f64 / sigma;
                signal[idx as usize] += amp * (1.0 - t * t) * (-0.5 * t * t).exp();
            }
        }
        apexes.push(center);
        center += period;
        k += 1;
    }
    (signal.iter().map(|&v| v.round() as i32).collect(), apexes)
}
