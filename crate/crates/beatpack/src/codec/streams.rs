//! Symbol streams for entropy coding: magnitudes of the surviving quantized
//! coefficients, their signs, and the gap vector locating them.

use crate::error::{Error, Result};

/// The four entropy-coded vectors plus bookkeeping. Positions are 1-based;
/// the first gap entry is the first nonzero position itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolStreams {
    /// `|q|` at nonzero positions, ascending position order.
    pub magnitudes: Vec<u32>,
    /// 1 for positive, 0 for negative.
    pub signs: Vec<u32>,
    /// First nonzero position, then successive position differences.
    pub gaps: Vec<u32>,
    /// Beat lengths (empty in 1D mode).
    pub beat_lengths: Vec<u32>,
    /// Length of the flattened coefficient vector.
    pub total_len: usize,
}

impl SymbolStreams {
    /// Number of surviving nonzero coefficients.
    pub fn nonzero_count(&self) -> usize {
        self.magnitudes.len()
    }
}

/// Collects nonzero entries of the (column-major flattened) quantized vector.
pub fn build_streams(quantized: &[i64], beat_lengths: &[u32]) -> SymbolStreams {
    let mut magnitudes = Vec::new();
    let mut signs = Vec::new();
    let mut gaps = Vec::new();
    let mut prev_pos = 0usize; // 1-based position of the previous nonzero
    for (i, &q) in quantized.iter().enumerate() {
        if q == 0 {
            continue;
        }
        let pos = i + 1;
        magnitudes.push(q.unsigned_abs().min(u64::from(u32::MAX)) as u32);
        signs.push(u32::from(q > 0));
        gaps.push((pos - prev_pos) as u32);
        prev_pos = pos;
    }
    SymbolStreams {
        magnitudes,
        signs,
        gaps,
        beat_lengths: beat_lengths.to_vec(),
        total_len: quantized.len(),
    }
}

/// Inverse of [`build_streams`]: scatters signed magnitudes back into a
/// zero-filled vector of `total_len` entries.
pub fn scatter_streams(streams: &SymbolStreams) -> Result<Vec<i64>> {
    let k = streams.magnitudes.len();
    if streams.signs.len() != k || streams.gaps.len() != k {
        return Err(Error::corrupt(format!(
            "stream lengths disagree: {} magnitudes, {} signs, {} gaps",
            k,
            streams.signs.len(),
            streams.gaps.len()
        )));
    }
    let mut out = vec![0i64; streams.total_len];
    let mut pos = 0usize; // running 1-based position
    for i in 0..k {
        let gap = streams.gaps[i] as usize;
        if gap == 0 {
            return Err(Error::corrupt("zero gap in position stream"));
        }
        pos += gap;
        if pos > streams.total_len {
            return Err(Error::corrupt(format!(
                "position {pos} beyond coefficient vector of {}",
                streams.total_len
            )));
        }
        if streams.magnitudes[i] == 0 {
            return Err(Error::corrupt("zero magnitude in nonzero stream"));
        }
        let signed = if streams.signs[i] > 0 {
            i64::from(streams.magnitudes[i])
        } else {
            -i64::from(streams.magnitudes[i])
        };
        out[pos - 1] = signed;
    }
    Ok(out)
}
