use crate::error::{Error, Result};

/// Mid-tread uniform quantization: `q = floor(b / delta + 1/2)`.
pub fn quantize(values: &[f64], delta: f64) -> Result<Vec<i64>> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::arg(format!(
            "quantization step must be positive, got {delta}"
        )));
    }
    Ok(values
        .iter()
        .map(|&b| (b / delta + 0.5).floor() as i64)
        .collect())
}

/// Reconstruction levels `q * delta` for the mid-tread quantizer.
pub fn dequantize(quantized: &[i64], delta: f64) -> Vec<f64> {
    quantized.iter().map(|&q| q as f64 * delta).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mid_tread_rounding() {
        assert_eq!(quantize(&[0.49], 1.0).unwrap(), vec![0]);
        assert_eq!(quantize(&[0.5], 1.0).unwrap(), vec![1]);
        assert_eq!(quantize(&[-0.6], 1.0).unwrap(), vec![-1]);
        assert_eq!(quantize(&[2.5], 0.5).unwrap(), vec![5]);
    }

    #[test]
    fn zero_maps_to_zero() {
        assert_eq!(quantize(&[0.0], 0.125).unwrap(), vec![0]);
    }

    #[test]
    fn invalid_delta_rejected() {
        assert!(quantize(&[1.0], 0.0).is_err());
        assert!(quantize(&[1.0], -1.0).is_err());
        assert!(quantize(&[1.0], f64::NAN).is_err());
    }

    #[test]
    fn reconstruction_error_bounded_by_half_step() {
        for delta in [0.25f64, 0.5, 1.0, 3.0] {
            let mut b = -100.0f64;
            while b <= 100.0 {
                let q = quantize(&[b], delta).unwrap();
                let r = dequantize(&q, delta)[0];
                assert!(
                    (b - r).abs() <= delta / 2.0 + 1e-9,
                    "b={b} delta={delta} r={r}"
                );
                b += 0.37;
            }
        }
    }
}
