//! On-disk layout of a compressed record.
//!
//! Little-endian header, four self-delimiting stream sections (canonical
//! codebook + MSB-first bit payload), and a trailing CRC32 over the stream
//! sections. See `docs/format.md` for the exact byte layout.

use crate::codec::huffman::Codebook;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"BPK1";
pub const FORMAT_VERSION: u8 = 1;

/// Decoder-side memory guard: coefficient vectors larger than this are
/// treated as corrupt rather than allocated.
pub const MAX_COEFFICIENTS: u64 = 1 << 26;

/// Header flag: 2D was requested but the record degenerated to 1D.
pub const FLAG_FALLBACK_1D: u8 = 0b0000_0001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Mode {
    #[serde(rename = "1d")]
    OneD,
    #[serde(rename = "2d")]
    TwoD,
}

impl Mode {
    fn code(self) -> u8 {
        match self {
            Mode::OneD => 1,
            Mode::TwoD => 2,
        }
    }

    fn from_code(code: u8) -> Result<Self> {
        match code {
            1 => Ok(Mode::OneD),
            2 => Ok(Mode::TwoD),
            other => Err(Error::corrupt(format!("unknown mode code {other}"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::OneD => "1d",
            Mode::TwoD => "2d",
        })
    }
}

/// Everything the decoder needs besides the entropy-coded payloads.
#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub mode: Mode,
    pub flags: u8,
    /// Effective wavelet depth (post-clamping).
    pub levels: u8,
    pub delta: f64,
    pub mean: f64,
    pub sampling_rate: f64,
    pub adc_bits: u8,
    pub record_id: String,
    /// 2D: (rows, cols). 1D: (signal length, 0).
    pub dims: (u32, u32),
}

/// One entropy-coded section.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedStream {
    pub count: u32,
    pub codebook: Codebook,
    pub payload: Vec<u8>,
    pub payload_bits: u64,
}

impl EncodedStream {
    pub fn empty() -> Self {
        Self {
            count: 0,
            codebook: Codebook::build(&[]),
            payload: Vec::new(),
            payload_bits: 0,
        }
    }
}

/// A parsed (or freshly encoded) compressed record. Stream order:
/// magnitudes, signs, gaps, beat lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedFile {
    pub header: Header,
    pub streams: [EncodedStream; 4],
}

impl CompressedFile {
    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let mut out = Vec::new();
        out.extend_from_slice(&MAGIC);
        out.push(FORMAT_VERSION);
        out.push(h.mode.code());
        out.push(h.flags);
        out.push(h.levels);
        out.extend_from_slice(&h.delta.to_le_bytes());
        out.extend_from_slice(&h.mean.to_le_bytes());
        out.extend_from_slice(&h.sampling_rate.to_le_bytes());
        out.push(h.adc_bits);
        let id = h.record_id.as_bytes();
        out.extend_from_slice(&(id.len().min(usize::from(u16::MAX)) as u16).to_le_bytes());
        out.extend_from_slice(&id[..id.len().min(usize::from(u16::MAX))]);
        out.extend_from_slice(&h.dims.0.to_le_bytes());
        out.extend_from_slice(&h.dims.1.to_le_bytes());

        let body_start = out.len();
        for stream in &self.streams {
            out.extend_from_slice(&stream.count.to_le_bytes());
            stream.codebook.serialize(&mut out);
            out.extend_from_slice(&(stream.payload_bits as u32).to_le_bytes());
            out.extend_from_slice(&stream.payload);
        }
        let crc = crc32fast::hash(&out[body_start..]);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cursor = 0usize;
        let take = |cursor: &mut usize, n: usize| -> Result<&[u8]> {
            let start = *cursor;
            let end = start
                .checked_add(n)
                .filter(|&e| e <= bytes.len())
                .ok_or_else(|| Error::corrupt(format!("file truncated at byte {start}")))?;
            *cursor = end;
            Ok(&bytes[start..end])
        };

        if take(&mut cursor, 4)? != MAGIC {
            return Err(Error::corrupt("bad magic"));
        }
        let version = take(&mut cursor, 1)?[0];
        if version != FORMAT_VERSION {
            return Err(Error::corrupt(format!("unsupported version {version}")));
        }
        let mode = Mode::from_code(take(&mut cursor, 1)?[0])?;
        let flags = take(&mut cursor, 1)?[0];
        let levels = take(&mut cursor, 1)?[0];
        let delta = f64::from_le_bytes(take(&mut cursor, 8)?.try_into().unwrap());
        let mean = f64::from_le_bytes(take(&mut cursor, 8)?.try_into().unwrap());
        let sampling_rate = f64::from_le_bytes(take(&mut cursor, 8)?.try_into().unwrap());
        let adc_bits = take(&mut cursor, 1)?[0];
        let id_len = u16::from_le_bytes(take(&mut cursor, 2)?.try_into().unwrap()) as usize;
        let record_id = String::from_utf8(take(&mut cursor, id_len)?.to_vec())
            .map_err(|_| Error::corrupt("record id is not UTF-8"))?;
        let dim0 = u32::from_le_bytes(take(&mut cursor, 4)?.try_into().unwrap());
        let dim1 = u32::from_le_bytes(take(&mut cursor, 4)?.try_into().unwrap());

        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::corrupt(format!("invalid quantization step {delta}")));
        }
        if !mean.is_finite() || !(sampling_rate > 0.0) || !sampling_rate.is_finite() {
            return Err(Error::corrupt("invalid mean or sampling rate"));
        }
        if adc_bits == 0 || adc_bits > 32 {
            return Err(Error::corrupt(format!("invalid adc bits {adc_bits}")));
        }
        if levels == 0 {
            return Err(Error::corrupt("wavelet levels must be >= 1"));
        }
        match mode {
            Mode::TwoD => {
                if dim0 == 0 || dim1 == 0 {
                    return Err(Error::corrupt("zero matrix dimension"));
                }
                if u64::from(dim0) * u64::from(dim1) > MAX_COEFFICIENTS {
                    return Err(Error::corrupt("coefficient matrix implausibly large"));
                }
            }
            Mode::OneD => {
                if dim0 == 0 {
                    return Err(Error::corrupt("zero signal length"));
                }
                if dim1 != 0 {
                    return Err(Error::corrupt("1D file with nonzero column count"));
                }
                if u64::from(dim0) > MAX_COEFFICIENTS {
                    return Err(Error::corrupt("signal implausibly large"));
                }
            }
        }

        let body_start = cursor;
        let mut streams = Vec::with_capacity(4);
        for _ in 0..4 {
            let count = u32::from_le_bytes(take(&mut cursor, 4)?.try_into().unwrap());
            let codebook = Codebook::deserialize(bytes, &mut cursor)?;
            let payload_bits =
                u64::from(u32::from_le_bytes(take(&mut cursor, 4)?.try_into().unwrap()));
            let payload_len = payload_bits.div_ceil(8) as usize;
            let payload = take(&mut cursor, payload_len)?.to_vec();
            streams.push(EncodedStream {
                count,
                codebook,
                payload,
                payload_bits,
            });
        }
        let body_end = cursor;
        let crc_stored = u32::from_le_bytes(take(&mut cursor, 4)?.try_into().unwrap());
        if cursor != bytes.len() {
            return Err(Error::corrupt(format!(
                "{} trailing bytes after checksum",
                bytes.len() - cursor
            )));
        }
        let crc = crc32fast::hash(&bytes[body_start..body_end]);
        if crc != crc_stored {
            return Err(Error::corrupt(format!(
                "checksum mismatch: stored {crc_stored:#10x}, computed {crc:#10x}"
            )));
        }

        let streams: [EncodedStream; 4] = streams.try_into().expect("exactly four streams");
        Ok(Self {
            header: Header {
                mode,
                flags,
                levels,
                delta,
                mean,
                sampling_rate,
                adc_bits,
                record_id,
                dims: (dim0, dim1),
            },
            streams,
        })
    }

    /// Exact size of the serialized file in bits.
    pub fn size_bits(&self) -> u64 {
        self.to_bytes().len() as u64 * 8
    }
}
