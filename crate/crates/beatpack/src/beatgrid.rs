//! Conversion between the 1D record and the 2D beat matrix.
//!
//! Every beat row starts at its R peak, so R peaks line up in column 0; the
//! pre-first-peak segment becomes a leading row. Rows are zero-padded to the
//! longest beat, and the record mean is removed before segmentation so the
//! padding does not step.

use crate::error::{Error, Result};
use crate::qrs::RPeakList;
use crate::record::EcgRecord;

/// Zero-padded beat matrix with the side information needed to undo it.
#[derive(Debug, Clone, PartialEq)]
pub struct BeatMatrix {
    /// Row-major `rows x cols`, mean-removed, zero-padded.
    pub data: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    /// True length of each beat row; `sum == record length`, `max == cols`.
    pub beat_lengths: Vec<u32>,
    /// Record mean, added back on reassembly.
    pub mean: f64,
}

impl BeatMatrix {
    /// Splits the record at its R peaks into left-aligned, zero-padded rows.
    pub fn segment(record: &EcgRecord, peaks: &RPeakList) -> Result<Self> {
        if peaks.is_empty() {
            return Err(Error::Segmentation("no R peaks to segment on".into()));
        }
        let n = record.len();
        if peaks.indices().last().copied().unwrap_or(0) >= n {
            return Err(Error::arg("peak index beyond record end"));
        }

        let mut starts: Vec<usize> = Vec::with_capacity(peaks.len() + 1);
        if peaks.indices()[0] > 0 {
            starts.push(0);
        }
        starts.extend_from_slice(peaks.indices());

        let mean = record.mean();
        let beat_lengths: Vec<u32> = starts
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let end = starts.get(i + 1).copied().unwrap_or(n);
                (end - s) as u32
            })
            .collect();
        let cols = beat_lengths.iter().copied().max().unwrap() as usize;
        let rows = starts.len();

        let mut data = vec![0.0; rows * cols];
        for (i, (&start, &len)) in starts.iter().zip(&beat_lengths).enumerate() {
            let row = &mut data[i * cols..(i + 1) * cols];
            for (j, &sample) in record.samples[start..start + len as usize].iter().enumerate() {
                row[j] = f64::from(sample) - mean;
            }
        }

        Ok(Self {
            data,
            rows,
            cols,
            beat_lengths,
            mean,
        })
    }

    /// Rebuilds matrix geometry from decoded side information (no sample
    /// data). `cols` must equal the longest beat.
    pub fn from_side_info(beat_lengths: Vec<u32>, mean: f64, cols: usize) -> Result<Self> {
        if beat_lengths.is_empty() {
            return Err(Error::arg("beat length vector is empty"));
        }
        if beat_lengths.iter().any(|&h| h == 0 || h as usize > cols) {
            return Err(Error::arg("beat length outside [1, cols]"));
        }
        if beat_lengths.iter().map(|&h| h as usize).max() != Some(cols) {
            return Err(Error::arg("cols must equal the longest beat"));
        }
        let rows = beat_lengths.len();
        Ok(Self {
            data: vec![0.0; rows * cols],
            rows,
            cols,
            beat_lengths,
            mean,
        })
    }

    /// Total sample count covered by the rows.
    pub fn signal_len(&self) -> usize {
        self.beat_lengths.iter().map(|&h| h as usize).sum()
    }

    /// Concatenates the first `h[i]` entries of each row of `reconstructed`,
    /// adds the mean back, and rounds to integer samples.
    pub fn reassemble(&self, reconstructed: &[f64]) -> Result<Vec<i32>> {
        if reconstructed.len() != self.rows * self.cols {
            return Err(Error::arg(format!(
                "reconstructed matrix is {} values, expected {}x{}",
                reconstructed.len(),
                self.rows,
                self.cols
            )));
        }
        let mut out = Vec::with_capacity(self.signal_len());
        for (i, &len) in self.beat_lengths.iter().enumerate() {
            let row = &reconstructed[i * self.cols..i * self.cols + len as usize];
            out.extend(row.iter().map(|&v| (v + self.mean).round() as i32));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(samples: Vec<i32>) -> EcgRecord {
        EcgRecord::new(samples, 360.0, 11, "test").unwrap()
    }

    fn peaks(idx: &[usize]) -> RPeakList {
        RPeakList::from_indices(idx.to_vec()).unwrap()
    }

    #[test]
    fn segments_with_peak_at_origin() {
        let rec = record((0..10).collect());
        let grid = BeatMatrix::segment(&rec, &peaks(&[0, 4, 7])).unwrap();
        assert_eq!(grid.rows, 3);
        assert_eq!(grid.cols, 4);
        assert_eq!(grid.beat_lengths, vec![4, 3, 3]);
        // Row 1 covers samples 4..=6, mean-removed, padded with one zero.
        let mu = grid.mean;
        let row1: Vec<f64> = grid.data[4..8].to_vec();
        assert_eq!(row1, vec![4.0 - mu, 5.0 - mu, 6.0 - mu, 0.0]);
    }

    #[test]
    fn head_segment_becomes_leading_row() {
        let rec = record((0..10).collect());
        let grid = BeatMatrix::segment(&rec, &peaks(&[2, 6])).unwrap();
        assert_eq!(grid.rows, 3);
        assert_eq!(grid.cols, 4);
        assert_eq!(grid.beat_lengths, vec![2, 4, 4]);
    }

    #[test]
    fn beat_lengths_cover_the_record() {
        let rec = record((0..1000).map(|i| i % 37).collect());
        let grid = BeatMatrix::segment(&rec, &peaks(&[13, 349, 350, 800])).unwrap();
        assert_eq!(grid.signal_len(), 1000);
        assert_eq!(
            grid.beat_lengths.iter().map(|&h| h as usize).max().unwrap(),
            grid.cols
        );
    }

    #[test]
    fn round_trip_is_identity() {
        let samples: Vec<i32> = (0..500).map(|i| ((i * 7919) % 2048) as i32 - 1024).collect();
        let rec = record(samples.clone());
        for peak_set in [vec![0, 100, 230, 231, 499], vec![5, 250], vec![499]] {
            let grid = BeatMatrix::segment(&rec, &peaks(&peak_set)).unwrap();
            let back = grid.reassemble(&grid.data).unwrap();
            assert_eq!(back, samples);
        }
    }

    #[test]
    fn padding_cells_do_not_influence_output() {
        let rec = record((0..10).collect());
        let grid = BeatMatrix::segment(&rec, &peaks(&[0, 4, 7])).unwrap();
        let mut perturbed = grid.data.clone();
        for (i, &len) in grid.beat_lengths.iter().enumerate() {
            for j in len as usize..grid.cols {
                perturbed[i * grid.cols + j] = 99.0;
            }
        }
        assert_eq!(
            grid.reassemble(&perturbed).unwrap(),
            grid.reassemble(&grid.data).unwrap()
        );
    }

    #[test]
    fn zero_matrix_reassembles_to_mean() {
        let grid = BeatMatrix::from_side_info(vec![2, 2], 5.0, 2).unwrap();
        assert_eq!(grid.reassemble(&vec![0.0; 4]).unwrap(), vec![5, 5, 5, 5]);
    }

    #[test]
    fn empty_peaks_is_segmentation_error() {
        let rec = record(vec![1, 2, 3]);
        let empty = RPeakList::from_indices(vec![]).unwrap();
        assert!(matches!(
            BeatMatrix::segment(&rec, &empty),
            Err(Error::Segmentation(_))
        ));
    }

    #[test]
    fn out_of_range_peak_rejected() {
        let rec = record(vec![1, 2, 3]);
        assert!(BeatMatrix::segment(&rec, &peaks(&[5])).is_err());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let rec = record((0..10).collect());
        let grid = BeatMatrix::segment(&rec, &peaks(&[4])).unwrap();
        assert!(grid.reassemble(&vec![0.0; 3]).is_err());
    }

    #[test]
    fn side_info_validation() {
        assert!(BeatMatrix::from_side_info(vec![], 0.0, 4).is_err());
        assert!(BeatMatrix::from_side_info(vec![0, 2], 0.0, 2).is_err());
        assert!(BeatMatrix::from_side_info(vec![2, 3], 0.0, 4).is_err());
        assert!(BeatMatrix::from_side_info(vec![2, 4], 0.0, 4).is_ok());
    }

    #[test]
    fn row_count_follows_first_peak_position() {
        let rec = record((0..50).collect());
        assert_eq!(BeatMatrix::segment(&rec, &peaks(&[0, 25])).unwrap().rows, 2);
        assert_eq!(BeatMatrix::segment(&rec, &peaks(&[1, 25])).unwrap().rows, 3);
    }
}
