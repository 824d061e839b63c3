//! Record-level encode and decode: transform, quantize, stream building,
//! and entropy coding, in both the 2D beat-matrix mode and the 1D baseline.

mod bitio;
mod container;
mod huffman;
mod quant;
mod streams;

pub use container::{CompressedFile, EncodedStream, Header, Mode, FLAG_FALLBACK_1D};
pub use huffman::{huffman_decode, huffman_encode, Codebook, ESCAPE_THRESHOLD};
pub use quant::{dequantize, quantize};
pub use streams::{build_streams, scatter_streams, SymbolStreams};

use crate::beatgrid::BeatMatrix;
use crate::error::{Error, Result};
use crate::qrs;
use crate::record::EcgRecord;
use crate::transform::{dwt97_forward, dwt97_inverse, mixed_forward, mixed_inverse};
use crate::transform::{TransformedMatrix, WaveletPlan};

pub const DEFAULT_LEVELS_1D: usize = 4;
pub const DEFAULT_LEVELS_2D: usize = 6;

/// Row-major `rows x cols` -> column-major vector.
fn flatten_column_major(data: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    debug_assert_eq!(data.len(), rows * cols);
    let mut out = Vec::with_capacity(data.len());
    for c in 0..cols {
        for r in 0..rows {
            out.push(data[r * cols + c]);
        }
    }
    out
}

/// Column-major vector -> row-major `rows x cols`.
fn unflatten_column_major(b: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    debug_assert_eq!(b.len(), rows * cols);
    let mut out = vec![0.0; b.len()];
    for c in 0..cols {
        for r in 0..rows {
            out[r * cols + c] = b[c * rows + r];
        }
    }
    out
}

/// A record with its transform already applied, ready to encode at any
/// quantization step. Rate control re-encodes many times; the transform and
/// segmentation happen once here.
pub struct PreparedRecord {
    mode: Mode,
    fell_back: bool,
    /// Column-major flattened transform coefficients.
    flattened: Vec<f64>,
    beat_lengths: Vec<u32>,
    mean: f64,
    dims: (u32, u32),
    levels: u8,
    sampling_rate: f64,
    adc_bits: u8,
    record_id: String,
}

impl PreparedRecord {
    pub fn new(record: &EcgRecord, mode: Mode, levels: Option<usize>) -> Result<Self> {
        if record.len() < 2 {
            return Err(Error::arg("record must hold at least 2 samples"));
        }
        if let Some(l) = levels {
            if l == 0 || l > 32 {
                return Err(Error::arg(format!("levels must be in 1..=32, got {l}")));
            }
        }
        match mode {
            Mode::TwoD => match Self::try_two_d(record, levels) {
                Some(prepared) => Ok(prepared),
                None => {
                    let mut prepared = Self::one_d(record, levels)?;
                    prepared.fell_back = true;
                    Ok(prepared)
                }
            },
            Mode::OneD => Self::one_d(record, levels),
        }
    }

    /// 2D preparation; `None` when the record degenerates (no usable peaks
    /// or single-column matrix) and the 1D fallback should take over.
    fn try_two_d(record: &EcgRecord, levels: Option<usize>) -> Option<Self> {
        let peaks = qrs::detect_r_peaks(record).ok()?;
        if peaks.len() < 2 {
            return None;
        }
        let grid = BeatMatrix::segment(record, &peaks).ok()?;
        if grid.cols < 2 {
            return None;
        }
        let tm = mixed_forward(&grid, levels.unwrap_or(DEFAULT_LEVELS_2D)).ok()?;
        let flattened = flatten_column_major(&tm.coeffs, tm.rows, tm.cols);
        Some(Self {
            mode: Mode::TwoD,
            fell_back: false,
            flattened,
            beat_lengths: grid.beat_lengths,
            mean: grid.mean,
            dims: (tm.rows as u32, tm.cols as u32),
            levels: tm.row_plan.levels as u8,
            sampling_rate: record.sampling_rate,
            adc_bits: record.adc_bits,
            record_id: record.record_id.clone(),
        })
    }

    fn one_d(record: &EcgRecord, levels: Option<usize>) -> Result<Self> {
        let mean = record.mean();
        let centered: Vec<f64> = record.samples.iter().map(|&s| f64::from(s) - mean).collect();
        let (coeffs, plan) = dwt97_forward(&centered, levels.unwrap_or(DEFAULT_LEVELS_1D))?;
        Ok(Self {
            mode: Mode::OneD,
            fell_back: false,
            flattened: coeffs,
            beat_lengths: Vec::new(),
            mean,
            dims: (record.len() as u32, 0),
            levels: plan.levels as u8,
            sampling_rate: record.sampling_rate,
            adc_bits: record.adc_bits,
            record_id: record.record_id.clone(),
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn fell_back(&self) -> bool {
        self.fell_back
    }

    /// Quantizes and entropy-codes the prepared coefficients.
    pub fn encode(&self, delta: f64) -> Result<CompressedFile> {
        let quantized = quantize(&self.flattened, delta)?;
        if quantized.iter().any(|&q| q.unsigned_abs() > u64::from(u32::MAX)) {
            return Err(Error::arg(format!(
                "quantization step {delta} too small: coefficient magnitude overflows 32 bits"
            )));
        }
        let streams = build_streams(&quantized, &self.beat_lengths);
        let encode = |values: &[u32]| {
            let (codebook, payload, payload_bits) = huffman_encode(values);
            EncodedStream {
                count: values.len() as u32,
                codebook,
                payload,
                payload_bits,
            }
        };
        Ok(CompressedFile {
            header: Header {
                mode: self.mode,
                flags: if self.fell_back { FLAG_FALLBACK_1D } else { 0 },
                levels: self.levels,
                delta,
                mean: self.mean,
                sampling_rate: self.sampling_rate,
                adc_bits: self.adc_bits,
                record_id: self.record_id.clone(),
                dims: self.dims,
            },
            streams: [
                encode(&streams.magnitudes),
                encode(&streams.signs),
                encode(&streams.gaps),
                encode(&streams.beat_lengths),
            ],
        })
    }
}

/// One-shot encode: detect/segment/transform (mode-dependent), quantize at
/// `delta`, entropy-code. A 2D request silently falls back to 1D when the
/// record has no usable beat structure; the header flags it.
pub fn encode_record(
    record: &EcgRecord,
    delta: f64,
    mode: Mode,
    levels: Option<usize>,
) -> Result<CompressedFile> {
    PreparedRecord::new(record, mode, levels)?.encode(delta)
}

/// Full decode back to integer samples.
pub fn decode_record(file: &CompressedFile) -> Result<EcgRecord> {
    let h = &file.header;
    let total_len: usize = match h.mode {
        Mode::TwoD => h.dims.0 as usize * h.dims.1 as usize,
        Mode::OneD => h.dims.0 as usize,
    };

    let k = file.streams[0].count;
    if file.streams[1].count != k || file.streams[2].count != k {
        return Err(Error::corrupt("stream symbol counts disagree"));
    }
    if u64::from(k) > total_len as u64 {
        return Err(Error::corrupt(format!(
            "{k} nonzero coefficients cannot fit {total_len} positions"
        )));
    }
    match h.mode {
        Mode::TwoD => {
            if file.streams[3].count != h.dims.0 {
                return Err(Error::corrupt("beat count does not match row count"));
            }
        }
        Mode::OneD => {
            if file.streams[3].count != 0 {
                return Err(Error::corrupt("1D file carries beat lengths"));
            }
        }
    }

    let decode = |s: &EncodedStream| {
        huffman_decode(&s.codebook, &s.payload, s.payload_bits, s.count as usize)
    };
    let symbol_streams = SymbolStreams {
        magnitudes: decode(&file.streams[0])?,
        signs: decode(&file.streams[1])?,
        gaps: decode(&file.streams[2])?,
        beat_lengths: decode(&file.streams[3])?,
        total_len,
    };
    let quantized = scatter_streams(&symbol_streams)?;
    let coeffs = dequantize(&quantized, h.delta);

    let samples = match h.mode {
        Mode::TwoD => {
            let (rows, cols) = (h.dims.0 as usize, h.dims.1 as usize);
            let grid =
                BeatMatrix::from_side_info(symbol_streams.beat_lengths, h.mean, cols)?;
            let row_plan = WaveletPlan::new(cols, usize::from(h.levels))?;
            if row_plan.levels != usize::from(h.levels) {
                return Err(Error::corrupt(format!(
                    "header levels {} unsupported for width {cols}",
                    h.levels
                )));
            }
            let tm = TransformedMatrix {
                coeffs: unflatten_column_major(&coeffs, rows, cols),
                rows,
                cols,
                row_plan,
            };
            let reconstructed = mixed_inverse(&tm)?;
            grid.reassemble(&reconstructed)?
        }
        Mode::OneD => {
            let plan = WaveletPlan::new(total_len, usize::from(h.levels))?;
            if plan.levels != usize::from(h.levels) {
                return Err(Error::corrupt(format!(
                    "header levels {} unsupported for length {total_len}",
                    h.levels
                )));
            }
            let signal = dwt97_inverse(&coeffs, &plan)?;
            signal
                .iter()
                .map(|&v| (v + h.mean).round() as i32)
                .collect()
        }
    };

    EcgRecord::new(samples, h.sampling_rate, h.adc_bits, h.record_id.clone())
}
