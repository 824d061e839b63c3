//! Orthonormal DCT-II / DCT-III pair.
//!
//! Computed through a same-length complex FFT (even/odd reordering plus a
//! quarter-sample twiddle), so column transforms on tall beat matrices stay
//! O(L log L). Normalization: `X[k] = w(k) * sum x[n] cos(pi (2n+1) k / 2L)`
//! with `w(0) = sqrt(1/L)`, `w(k>0) = sqrt(2/L)`; the inverse is the exact
//! adjoint, making the pair an isometry.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Precomputed state for transforming many vectors of one length.
pub struct DctPlan {
    len: usize,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
    /// exp(-i pi k / 2L) for k in 0..L
    twiddle: Vec<Complex<f64>>,
}

impl DctPlan {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "DCT length must be positive");
        let mut planner = FftPlanner::new();
        let twiddle = (0..len)
            .map(|k| Complex::from_polar(1.0, -PI * k as f64 / (2.0 * len as f64)))
            .collect();
        Self {
            len,
            fft_fwd: planner.plan_fft_forward(len),
            fft_inv: planner.plan_fft_inverse(len),
            twiddle,
        }
    }

    /// Forward orthonormal DCT-II, writing over `data`.
    pub fn forward(&self, data: &mut [f64]) {
        let n = self.len;
        debug_assert_eq!(data.len(), n);
        if n == 1 {
            return;
        }
        // v = [x0, x2, x4, ..., x5, x3, x1]
        let mut buf: Vec<Complex<f64>> = Vec::with_capacity(n);
        let half = n.div_ceil(2);
        buf.extend((0..half).map(|i| Complex::new(data[2 * i], 0.0)));
        buf.extend((0..n / 2).rev().map(|i| Complex::new(data[2 * i + 1], 0.0)));
        self.fft_fwd.process(&mut buf);
        let w0 = (1.0 / n as f64).sqrt();
        let w = (2.0 / n as f64).sqrt();
        data[0] = buf[0].re * w0;
        for k in 1..n {
            data[k] = (self.twiddle[k] * buf[k]).re * w;
        }
    }

    /// Inverse orthonormal DCT-III, writing over `data`.
    pub fn inverse(&self, data: &mut [f64]) {
        let n = self.len;
        debug_assert_eq!(data.len(), n);
        if n == 1 {
            return;
        }
        let w0 = (1.0 / n as f64).sqrt();
        let w = (2.0 / n as f64).sqrt();
        // Rebuild the half-shifted spectrum: V[k] = 0.5 e^{i pi k/2L} (T[k] - i T[L-k])
        // with T[k] = 2 X[k] / w(k), so the halves cancel for k >= 1.
        let mut buf: Vec<Complex<f64>> = Vec::with_capacity(n);
        buf.push(Complex::new(data[0] / w0, 0.0));
        for k in 1..n {
            let t = data[k] / w;
            let t_mirror = data[n - k] / w;
            buf.push(self.twiddle[k].conj() * Complex::new(t, -t_mirror));
        }
        self.fft_inv.process(&mut buf);
        let scale = 1.0 / n as f64; // rustfft leaves the inverse unnormalized
        let half = n.div_ceil(2);
        for i in 0..half {
            data[2 * i] = buf[i].re * scale;
        }
        for i in 0..n / 2 {
            data[2 * i + 1] = buf[n - 1 - i].re * scale;
        }
    }
}

/// Orthonormal DCT-II of a single vector.
pub fn dct_forward(input: &[f64]) -> Vec<f64> {
    let mut out = input.to_vec();
    if !out.is_empty() {
        DctPlan::new(out.len()).forward(&mut out);
    }
    out
}

/// Orthonormal DCT-III (inverse of [`dct_forward`]) of a single vector.
pub fn dct_inverse(input: &[f64]) -> Vec<f64> {
    let mut out = input.to_vec();
    if !out.is_empty() {
        DctPlan::new(out.len()).inverse(&mut out);
    }
    out
}
