//! Distortion and rate metrics: PRD, baseline-referenced PRD, and
//! compression ratio.

use serde::{Deserialize, Serialize};

use crate::codec::{CompressedFile, Mode};
use crate::error::{Error, Result};
use crate::record::EcgRecord;

/// Which distortion number a rate search should hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "prd")]
    Prd,
    #[serde(rename = "prdb")]
    PrdB,
}

/// Baseline conventionally removed from offset-binary ECG data when quoting
/// PRD against prior 2D compression work.
pub const PRD_B_BASELINE: f64 = 1024.0;

fn norms(original: &[i32], reconstructed: &[i32], baseline: f64) -> Result<(f64, f64)> {
    if original.len() != reconstructed.len() {
        return Err(Error::arg(format!(
            "length mismatch: {} vs {}",
            original.len(),
            reconstructed.len()
        )));
    }
    let mut err = 0.0f64;
    let mut reference = 0.0f64;
    for (&f, &r) in original.iter().zip(reconstructed) {
        let d = f64::from(f) - f64::from(r);
        err += d * d;
        let v = f64::from(f) - baseline;
        reference += v * v;
    }
    if reference <= 0.0 {
        return Err(Error::arg("reference signal norm is zero"));
    }
    Ok((err.sqrt(), reference.sqrt()))
}

/// Percent root-mean-square difference: `100 * ||f - fr|| / ||f||`.
pub fn prd(original: &[i32], reconstructed: &[i32]) -> Result<f64> {
    let (err, reference) = norms(original, reconstructed, 0.0)?;
    Ok(100.0 * err / reference)
}

/// PRD with `baseline` subtracted from the original in the denominator only.
pub fn prd_b(original: &[i32], reconstructed: &[i32], baseline: f64) -> Result<f64> {
    let (err, reference) = norms(original, reconstructed, baseline)?;
    Ok(100.0 * err / reference)
}

/// Uncompressed bits over compressed bits.
pub fn compression_ratio(uncompressed_bits: u64, compressed_bits: u64) -> Result<f64> {
    if compressed_bits == 0 {
        return Err(Error::arg("compressed size is zero"));
    }
    Ok(uncompressed_bits as f64 / compressed_bits as f64)
}

/// Everything worth reporting about one encode of one record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub record_id: String,
    pub mode: Mode,
    pub delta: f64,
    pub cr: f64,
    pub prd: f64,
    pub prd_b: f64,
    pub compressed_bits: u64,
    pub uncompressed_bits: u64,
}

impl QualityReport {
    /// Measures a finished encode against the original record.
    pub fn measure(
        record: &EcgRecord,
        file: &CompressedFile,
        decoded: &EcgRecord,
    ) -> Result<Self> {
        let compressed_bits = file.size_bits();
        let uncompressed_bits = record.uncompressed_size_bits();
        Ok(Self {
            record_id: record.record_id.clone(),
            mode: file.header.mode,
            delta: file.header.delta,
            cr: compression_ratio(uncompressed_bits, compressed_bits)?,
            prd: prd(&record.samples, &decoded.samples)?,
            prd_b: prd_b(&record.samples, &decoded.samples, PRD_B_BASELINE)?,
            compressed_bits,
            uncompressed_bits,
        })
    }

    pub fn metric_value(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Prd => self.prd,
            Metric::PrdB => self.prd_b,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_signals_have_zero_prd() {
        let f = vec![5, -3, 17];
        assert_eq!(prd(&f, &f).unwrap(), 0.0);
        assert_eq!(prd_b(&f, &f, 1024.0).unwrap(), 0.0);
    }

    #[test]
    fn one_percent_shrink_is_one_prd() {
        let f: Vec<i32> = (1..=100).map(|i| i * 100).collect();
        let fr: Vec<i32> = f.iter().map(|&v| v * 99 / 100).collect();
        let p = prd(&f, &fr).unwrap();
        assert!((p - 1.0).abs() < 1e-9);
    }

    #[test]
    fn three_four_five() {
        assert!((prd(&[3, 4], &[3, 0]).unwrap() - 80.0).abs() < 1e-12);
    }

    #[test]
    fn baseline_shifts_only_the_denominator() {
        let f = vec![1025, 1025];
        let fr = vec![1024, 1024];
        assert!((prd_b(&f, &fr, 1024.0).unwrap() - 100.0).abs() < 1e-12);
        // Against raw norm the same error is tiny.
        assert!(prd(&f, &fr).unwrap() < 0.1);
    }

    #[test]
    fn zero_baseline_recovers_plain_prd() {
        let f = vec![30, -40, 7];
        let fr = vec![28, -41, 9];
        assert_eq!(prd(&f, &fr).unwrap(), prd_b(&f, &fr, 0.0).unwrap());
    }

    #[test]
    fn prd_b_below_prd_on_offset_binary_data() {
        // Mean near 1024 with small AC swing: removing the baseline shrinks
        // the denominator, so the ratio grows... meaning prd < prd_b. The
        // directional claim is prd_b > prd here; check it both ways around.
        let f: Vec<i32> = (0..1000).map(|i| 1024 + ((i % 20) - 10)).collect();
        let fr: Vec<i32> = f.iter().map(|&v| v + 1).collect();
        assert!(prd_b(&f, &fr, 1024.0).unwrap() > prd(&f, &fr).unwrap());
    }

    #[test]
    fn prd_scale_invariance() {
        let f = vec![100, -250, 375, 12];
        let fr = vec![90, -260, 300, 20];
        let f2: Vec<i32> = f.iter().map(|&v| v * 3).collect();
        let fr2: Vec<i32> = fr.iter().map(|&v| v * 3).collect();
        assert!((prd(&f, &fr).unwrap() - prd(&f2, &fr2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert!(prd(&[1, 2], &[1]).is_err());
        assert!(prd(&[0, 0], &[1, 1]).is_err());
        assert!(prd_b(&[1024, 1024], &[0, 0], 1024.0).is_err());
        assert!(compression_ratio(100, 0).is_err());
    }

    #[test]
    fn compression_ratio_examples() {
        assert_eq!(compression_ratio(7_150_000, 143_000).unwrap(), 50.0);
        assert_eq!(compression_ratio(4096, 4096).unwrap(), 1.0);
    }
}
