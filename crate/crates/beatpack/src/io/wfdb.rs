//! WFDB format-212 signal files and minimal header parsing.
//!
//! Format 212 packs two 12-bit two's-complement samples into three bytes:
//! for a triple `(b0, b1, b2)`, the first sample is `(b1 & 0x0F) << 8 | b0`
//! and the second is `(b1 & 0xF0) << 4 | b2`, both sign-extended. Channels
//! interleave sample by sample.

use std::path::Path;

use crate::error::{Error, Result};
use crate::record::EcgRecord;

fn sign_extend_12(v: u16) -> i32 {
    if v & 0x800 != 0 {
        i32::from(v) - 0x1000
    } else {
        i32::from(v)
    }
}

/// Decodes one channel out of a format-212 byte stream holding
/// `num_samples` samples for each of `channels_total` channels.
pub fn read_wfdb_212(
    data: &[u8],
    num_samples: usize,
    channel: usize,
    channels_total: usize,
) -> Result<Vec<i32>> {
    if channels_total == 0 {
        return Err(Error::arg("channel count must be positive"));
    }
    if channel >= channels_total {
        return Err(Error::arg(format!(
            "channel {channel} out of range for {channels_total} channels"
        )));
    }
    let total_values = num_samples
        .checked_mul(channels_total)
        .ok_or_else(|| Error::arg("sample count overflow"))?;
    let required = total_values.div_ceil(2) * 3 - usize::from(total_values % 2 == 1);
    if data.len() < required {
        return Err(Error::Decode {
            offset: data.len(),
            msg: format!("format 212 stream needs {required} bytes for {total_values} values"),
        });
    }

    let mut out = Vec::with_capacity(num_samples);
    for v in (channel..total_values).step_by(channels_total) {
        let base = v / 2 * 3;
        let raw = if v % 2 == 0 {
            (u16::from(data[base + 1] & 0x0F) << 8) | u16::from(data[base])
        } else {
            (u16::from(data[base + 1] & 0xF0) << 4) | u16::from(data[base + 2])
        };
        out.push(sign_extend_12(raw));
    }
    Ok(out)
}

/// Packs 12-bit samples (single channel, or pre-interleaved values) into the
/// format-212 layout. Useful for fixtures; values must fit 12 bits.
pub fn pack_wfdb_212(values: &[i32]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(values.len().div_ceil(2) * 3);
    for pair in values.chunks(2) {
        let encode = |v: i32| -> Result<u16> {
            if !(-2048..=2047).contains(&v) {
                return Err(Error::arg(format!("value {v} does not fit 12 bits")));
            }
            Ok((v & 0xFFF) as u16)
        };
        let a = encode(pair[0])?;
        let b = encode(pair.get(1).copied().unwrap_or(0))?;
        out.push((a & 0xFF) as u8);
        out.push(((a >> 8) as u8 & 0x0F) | ((b >> 8) as u8 & 0x0F) << 4);
        out.push((b & 0xFF) as u8);
    }
    if values.len() % 2 == 1 {
        // An odd tail still occupies a full triple on disk; keep it.
    }
    Ok(out)
}

/// The fields of a WFDB header this codec cares about.
#[derive(Debug, Clone, PartialEq)]
pub struct WfdbHeader {
    pub record_name: String,
    pub channels: usize,
    pub sampling_rate: f64,
    pub num_samples: usize,
    /// Per-channel (data file name, format code, adc resolution bits).
    pub signals: Vec<(String, u16, u8)>,
}

/// Parses the record line and signal lines of a `.hea` file. Only the
/// sample count, channel count, sampling rate, format code, and ADC
/// resolution are interpreted.
pub fn parse_hea(text: &str) -> Result<WfdbHeader> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));

    let (line_no, record_line) = lines
        .next()
        .ok_or(Error::Parse {
            line: 1,
            msg: "empty header".into(),
        })?;
    let fields: Vec<&str> = record_line.split_whitespace().collect();
    if fields.len() < 2 {
        return Err(Error::Parse {
            line: line_no + 1,
            msg: "record line needs at least a name and signal count".into(),
        });
    }
    // Record name may carry a segment suffix ("100/2"); keep the stem.
    let record_name = fields[0].split('/').next().unwrap_or(fields[0]).to_string();
    let channels: usize = fields[1].parse().map_err(|_| Error::Parse {
        line: line_no + 1,
        msg: format!("bad signal count {:?}", fields[1]),
    })?;
    let sampling_rate: f64 = match fields.get(2) {
        // The rate field may carry counter info ("360/360(0)"); take the stem.
        Some(f) => f
            .split('/')
            .next()
            .unwrap_or(f)
            .parse()
            .map_err(|_| Error::Parse {
                line: line_no + 1,
                msg: format!("bad sampling rate {f:?}"),
            })?,
        None => 250.0, // WFDB default
    };
    let num_samples: usize = match fields.get(3) {
        Some(f) => f.parse().map_err(|_| Error::Parse {
            line: line_no + 1,
            msg: format!("bad sample count {f:?}"),
        })?,
        None => 0,
    };

    let mut signals = Vec::with_capacity(channels);
    for _ in 0..channels {
        let (line_no, line) = lines.next().ok_or(Error::Parse {
            line: line_no + 1,
            msg: format!("expected {channels} signal lines"),
        })?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 {
            return Err(Error::Parse {
                line: line_no + 1,
                msg: "signal line needs a file name and format".into(),
            });
        }
        // Format may carry xN/:skew/+offset decorations; digits prefix it.
        let digits: String = fields[1].chars().take_while(char::is_ascii_digit).collect();
        let format: u16 = digits.parse().map_err(|_| Error::Parse {
            line: line_no + 1,
            msg: format!("bad format code {:?}", fields[1]),
        })?;
        let adc_bits: u8 = fields
            .get(3)
            .and_then(|f| f.parse().ok())
            .filter(|&b| b > 0 && b <= 32)
            .unwrap_or(12);
        signals.push((fields[0].to_string(), format, adc_bits));
    }

    Ok(WfdbHeader {
        record_name,
        channels,
        sampling_rate,
        num_samples,
        signals,
    })
}

/// Loads one channel of a WFDB record given its `.hea` path.
pub fn read_record_file(hea_path: &Path, channel: usize) -> Result<EcgRecord> {
    let text = std::fs::read_to_string(hea_path)?;
    let header = parse_hea(&text)?;
    let (file_name, format, adc_bits) =
        header
            .signals
            .get(channel)
            .cloned()
            .ok_or_else(|| Error::arg(format!(
                "channel {channel} out of range for {} channels",
                header.channels
            )))?;
    if format != 212 {
        return Err(Error::arg(format!(
            "unsupported WFDB signal format {format} (only 212)"
        )));
    }
    let dat_path = hea_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(&file_name);
    let data = std::fs::read(&dat_path)?;
    let samples = read_wfdb_212(&data, header.num_samples, channel, header.channels)?;
    EcgRecord::new(samples, header.sampling_rate, adc_bits, header.record_name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decodes_byte_triples() {
        assert_eq!(read_wfdb_212(&[0x01, 0x00, 0x02], 2, 0, 1).unwrap(), vec![1, 2]);
        assert_eq!(read_wfdb_212(&[0xFF, 0x0F, 0x00], 2, 0, 1).unwrap(), vec![-1, 0]);
    }

    #[test]
    fn channel_interleave() {
        // Values 1, 2, 3, 4 over two channels: ch0 = [1, 3], ch1 = [2, 4].
        let packed = pack_wfdb_212(&[1, 2, 3, 4]).unwrap();
        assert_eq!(read_wfdb_212(&packed, 2, 0, 2).unwrap(), vec![1, 3]);
        assert_eq!(read_wfdb_212(&packed, 2, 1, 2).unwrap(), vec![2, 4]);
    }

    #[test]
    fn truncated_stream_names_offset() {
        let err = read_wfdb_212(&[0x01, 0x00], 2, 0, 1).unwrap_err();
        match err {
            Error::Decode { offset, .. } => assert_eq!(offset, 2),
            other => panic!("expected decode error, got {other:?}"),
        }
    }

    #[test]
    fn channel_out_of_range_rejected() {
        assert!(read_wfdb_212(&[0; 3], 1, 1, 1).is_err());
        assert!(read_wfdb_212(&[0; 3], 1, 0, 0).is_err());
    }

    /// Independent packer: assembles the 24-bit triple as a binary string.
    /// Deliberately avoids the arithmetic of `pack_wfdb_212`.
    fn pack_via_bit_strings(values: &[i32]) -> Vec<u8> {
        let mut out = Vec::new();
        for pair in values.chunks(2) {
            let a = pair[0];
            let b = pair.get(1).copied().unwrap_or(0);
            let twelve = |v: i32| -> String {
                let u = if v < 0 { (v + 4096) as u16 } else { v as u16 };
                format!("{u:012b}")
            };
            let (abits, bbits) = (twelve(a), twelve(b));
            // Triple layout: b0 = low 8 of a, b1 = high nibble of b | high nibble of a, b2 = low 8 of b.
            let byte = |s: &str| u8::from_str_radix(s, 2).unwrap();
            out.push(byte(&abits[4..12]));
            out.push(byte(&format!("{}{}", &bbits[0..4], &abits[0..4])));
            out.push(byte(&bbits[4..12]));
        }
        out
    }

    #[test]
    fn matches_independent_bit_string_packer() {
        let values: Vec<i32> = vec![-2048, 2047, 0, -1, 1, 1024, -1024, 77];
        assert_eq!(pack_via_bit_strings(&values), pack_wfdb_212(&values).unwrap());
        let read = read_wfdb_212(&pack_via_bit_strings(&values), values.len(), 0, 1).unwrap();
        assert_eq!(read, values);
    }

    proptest! {
        #[test]
        fn read_inverts_pack(values in proptest::collection::vec(-2048i32..=2047, 1..300)) {
            let packed = pack_wfdb_212(&values).unwrap();
            let read = read_wfdb_212(&packed, values.len(), 0, 1).unwrap();
            prop_assert_eq!(read, values);
        }
    }

    #[test]
    fn parses_mit_bih_style_header() {
        let text = "100 2 360 650000 0:0:0 0/0/0\n\
                    100.dat 212 200 11 1024 995 -22131 0 MLII\n\
                    100.dat 212 200 11 1024 1011 20052 0 V5\n\
                    # comment\n";
        let header = parse_hea(text).unwrap();
        assert_eq!(header.record_name, "100");
        assert_eq!(header.channels, 2);
        assert_eq!(header.sampling_rate, 360.0);
        assert_eq!(header.num_samples, 650_000);
        assert_eq!(header.signals[0], ("100.dat".into(), 212, 11));
        assert_eq!(header.signals[1], ("100.dat".into(), 212, 11));
    }

    #[test]
    fn malformed_headers_report_line() {
        assert!(matches!(parse_hea(""), Err(Error::Parse { line: 1, .. })));
        assert!(parse_hea("100").is_err());
        assert!(parse_hea("100 two").is_err());
        let missing_signals = "100 2 360 650000\n100.dat 212 200 11\n";
        assert!(parse_hea(missing_signals).is_err());
    }

    #[test]
    fn pack_rejects_out_of_range() {
        assert!(pack_wfdb_212(&[3000]).is_err());
        assert!(pack_wfdb_212(&[-3000]).is_err());
    }
}
