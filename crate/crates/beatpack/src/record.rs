use crate::error::{Error, Result};

/// An ECG record: raw integer ADC samples plus acquisition metadata.
///
/// Samples are kept verbatim as stored; no offset removal or physical-unit
/// calibration is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct EcgRecord {
    pub samples: Vec<i32>,
    /// Sampling frequency in Hz.
    pub sampling_rate: f64,
    /// ADC resolution in bits per sample; sets the uncompressed-size baseline.
    pub adc_bits: u8,
    pub record_id: String,
}

impl EcgRecord {
    pub fn new(
        samples: Vec<i32>,
        sampling_rate: f64,
        adc_bits: u8,
        record_id: impl Into<String>,
    ) -> Result<Self> {
        if sampling_rate <= 0.0 || !sampling_rate.is_finite() {
            return Err(Error::arg(format!(
                "sampling rate must be positive, got {sampling_rate}"
            )));
        }
        if adc_bits == 0 || adc_bits > 32 {
            return Err(Error::arg(format!("adc_bits out of range: {adc_bits}")));
        }
        Ok(Self {
            samples,
            sampling_rate,
            adc_bits,
            record_id: record_id.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Reference size of the record when stored raw: samples x adc_bits.
    pub fn uncompressed_size_bits(&self) -> u64 {
        self.samples.len() as u64 * u64::from(self.adc_bits)
    }

    /// Mean sample value.
    pub fn mean(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let sum: f64 = self.samples.iter().map(|&s| f64::from(s)).sum();
        sum / self.samples.len() as f64
    }
}
