//! Lossy ECG compression built on a beat-aligned 2D mixed transform.
//!
//! A record is cut at its R peaks into a zero-padded beat matrix, transformed
//! with a DCT across beats and a cdf97 wavelet within beats, mid-tread
//! quantized, and entropy coded into a self-describing bitstream. The same
//! coding chain minus segmentation doubles as the 1D baseline. Rate control
//! searches the quantization step per record to land on a distortion target.

pub mod beatgrid;
pub mod codec;
pub mod error;
pub mod io;
pub mod metrics;
pub mod qrs;
pub mod rate;
pub mod record;
#[cfg(test)]
pub(crate) mod testutil;
pub mod transform;

pub use beatgrid::BeatMatrix;
pub use codec::{decode_record, encode_record, CompressedFile, Mode, PreparedRecord};
pub use error::{Error, Result};
pub use metrics::{compression_ratio, prd, prd_b, Metric, QualityReport};
pub use qrs::{detect_r_peaks, RPeakList};
pub use rate::{find_delta, RateSearchResult};
pub use record::EcgRecord;
