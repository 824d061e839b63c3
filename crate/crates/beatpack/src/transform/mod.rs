//! Transform kernels: cdf97 lifting DWT, orthonormal DCT, and the mixed 2D
//! transform that applies the DCT down beat-matrix columns and the DWT along
//! beat rows.

mod dct;
mod dwt97;

pub use dct::{dct_forward, dct_inverse, DctPlan};
pub use dwt97::{dwt97_forward, dwt97_inverse, WaveletPlan};

use crate::beatgrid::BeatMatrix;
use crate::error::{Error, Result};

/// Mixed-transform coefficients of a beat matrix, plus the row plan needed
/// to invert them.
#[derive(Debug, Clone)]
pub struct TransformedMatrix {
    /// Row-major `rows x cols` coefficient array.
    pub coeffs: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    /// Wavelet layout shared by every row.
    pub row_plan: WaveletPlan,
}

/// DCT down every column, then cdf97 DWT along every row.
pub fn mixed_forward(grid: &BeatMatrix, levels: usize) -> Result<TransformedMatrix> {
    let (rows, cols) = (grid.rows, grid.cols);
    if rows < 1 || cols < 2 {
        return Err(Error::arg(format!(
            "beat matrix {rows}x{cols} too small for the mixed transform"
        )));
    }
    let mut coeffs = grid.data.clone();
    dct_columns(&mut coeffs, rows, cols, true);
    let row_plan = WaveletPlan::new(cols, levels)?;
    for row in coeffs.chunks_exact_mut(cols) {
        dwt97::dwt97_forward_with_plan(row, &row_plan);
    }
    Ok(TransformedMatrix {
        coeffs,
        rows,
        cols,
        row_plan,
    })
}

/// Exact inverse of [`mixed_forward`]: inverse row DWT, then inverse column DCT.
pub fn mixed_inverse(tm: &TransformedMatrix) -> Result<Vec<f64>> {
    if tm.coeffs.len() != tm.rows * tm.cols {
        return Err(Error::arg(format!(
            "coefficient array is {} values, expected {}x{}",
            tm.coeffs.len(),
            tm.rows,
            tm.cols
        )));
    }
    if tm.row_plan.signal_length != tm.cols {
        return Err(Error::arg("row plan does not match matrix width"));
    }
    let mut data = tm.coeffs.clone();
    for row in data.chunks_exact_mut(tm.cols) {
        dwt97::dwt97_inverse_with_plan(row, &tm.row_plan);
    }
    dct_columns(&mut data, tm.rows, tm.cols, false);
    Ok(data)
}

/// In-place DCT (or its inverse) of every column of a row-major matrix.
fn dct_columns(data: &mut [f64], rows: usize, cols: usize, forward: bool) {
    if rows == 1 {
        // Length-1 DCT is the identity.
        return;
    }
    let plan = DctPlan::new(rows);
    let mut column = vec![0.0; rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = data[r * cols + c];
        }
        if forward {
            plan.forward(&mut column);
        } else {
            plan.inverse(&mut column);
        }
        for r in 0..rows {
            data[r * cols + c] = column[r];
        }
    }
}
