//! Plain-format record I/O: CSV (one sample per line) and raw signed
//! 16-bit little-endian.

use crate::error::{Error, Result};
use crate::record::EcgRecord;

/// Parses one integer sample per line. Blank lines are ignored; anything
/// else that fails to parse reports its 1-based line number.
pub fn read_csv(text: &str, sampling_rate: f64, adc_bits: u8, record_id: &str) -> Result<EcgRecord> {
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value: i32 = trimmed.parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("not an integer sample: {trimmed:?}"),
        })?;
        samples.push(value);
    }
    if samples.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "no samples in input".into(),
        });
    }
    EcgRecord::new(samples, sampling_rate, adc_bits, record_id)
}

pub fn write_csv(samples: &[i32]) -> String {
    let mut out = String::with_capacity(samples.len() * 6);
    for s in samples {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}

/// Reads little-endian signed 16-bit samples.
pub fn read_raw16(
    bytes: &[u8],
    sampling_rate: f64,
    adc_bits: u8,
    record_id: &str,
) -> Result<EcgRecord> {
    if bytes.is_empty() {
        return Err(Error::Decode {
            offset: 0,
            msg: "no samples in input".into(),
        });
    }
    if bytes.len() % 2 != 0 {
        return Err(Error::Decode {
            offset: bytes.len() - 1,
            msg: "odd byte count for 16-bit samples".into(),
        });
    }
    let samples = bytes
        .chunks_exact(2)
        .map(|c| i32::from(i16::from_le_bytes([c[0], c[1]])))
        .collect();
    EcgRecord::new(samples, sampling_rate, adc_bits, record_id)
}

/// Writes samples as little-endian i16; errors when a value does not fit.
pub fn write_raw16(samples: &[i32]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(samples.len() * 2);
    for (i, &s) in samples.iter().enumerate() {
        let v = i16::try_from(s).map_err(|_| {
            Error::arg(format!("sample {i} value {s} does not fit 16 bits"))
        })?;
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}
