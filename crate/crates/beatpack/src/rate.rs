//! Per-record rate control: search the quantization step that reproduces a
//! distortion target sharply.
//!
//! Distortion grows with the step almost monotonically (quantizer staircase
//! effects aside), so a bisection in log-delta space converges fast; a fine
//! grid scan around the final bracket mops up local non-monotonicity.

use crate::codec::{decode_record, Mode, PreparedRecord};
use crate::error::{Error, Result};
use crate::metrics::{Metric, QualityReport};
use crate::record::EcgRecord;

pub const DELTA_MIN: f64 = 1e-4;
pub const DELTA_MAX: f64 = 1e4;
pub const DEFAULT_TOLERANCE: f64 = 0.01;
const MAX_ITERATIONS: usize = 60;
const GRID_SCAN_POINTS: usize = 24;

/// Outcome of a delta search. When the target cannot be hit inside the
/// bracket, `target_met` is false and the report describes the closest
/// achievable point.
#[derive(Debug, Clone)]
pub struct RateSearchResult {
    pub delta: f64,
    pub report: QualityReport,
    pub target_met: bool,
}

struct Evaluator<'a> {
    record: &'a EcgRecord,
    prepared: PreparedRecord,
    metric: Metric,
}

impl Evaluator<'_> {
    fn eval(&self, delta: f64) -> Result<(f64, QualityReport)> {
        let file = self.prepared.encode(delta)?;
        let decoded = decode_record(&file)?;
        let report = QualityReport::measure(self.record, &file, &decoded)?;
        Ok((report.metric_value(self.metric), report))
    }
}

/// Searches `delta` so the chosen metric lands within `tol` of `target`.
pub fn find_delta(
    record: &EcgRecord,
    target: f64,
    metric: Metric,
    mode: Mode,
    levels: Option<usize>,
    tol: f64,
) -> Result<RateSearchResult> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::arg(format!("tolerance must be positive, got {tol}")));
    }
    if !target.is_finite() {
        return Err(Error::arg("distortion target must be finite"));
    }
    let ev = Evaluator {
        record,
        prepared: PreparedRecord::new(record, mode, levels)?,
        metric,
    };

    // The finest step can overflow coefficient magnitudes on extreme
    // records; back off until the encode succeeds.
    let mut lo = DELTA_MIN;
    let (lo_val, lo_report) = loop {
        match ev.eval(lo) {
            Ok(v) => break v,
            Err(Error::InvalidArgument(_)) if lo < 1.0 => lo *= 10.0,
            Err(e) => return Err(e),
        }
    };

    // A non-positive target is unreachable by construction for a lossy
    // codec; report the finest step without claiming success.
    if target <= 0.0 {
        return Ok(RateSearchResult {
            delta: lo,
            report: lo_report,
            target_met: false,
        });
    }

    if (lo_val - target).abs() <= tol {
        return Ok(RateSearchResult {
            delta: lo,
            report: lo_report,
            target_met: true,
        });
    }
    if lo_val > target {
        // Even the finest step is more distorted than asked.
        return Ok(RateSearchResult {
            delta: lo,
            report: lo_report,
            target_met: false,
        });
    }

    let mut hi = DELTA_MAX;
    let (hi_val, hi_report) = ev.eval(hi)?;
    if (hi_val - target).abs() <= tol {
        return Ok(RateSearchResult {
            delta: hi,
            report: hi_report,
            target_met: true,
        });
    }
    if hi_val < target {
        return Ok(RateSearchResult {
            delta: hi,
            report: hi_report,
            target_met: false,
        });
    }

    let mut best: (f64, f64, QualityReport) = if (lo_val - target).abs() <= (hi_val - target).abs()
    {
        (lo, lo_val, lo_report.clone())
    } else {
        (hi, hi_val, hi_report)
    };

    for _ in 0..MAX_ITERATIONS {
        let mid = (lo * hi).sqrt();
        if !(mid > lo && mid < hi) {
            break; // bracket exhausted in floating point
        }
        let (val, report) = ev.eval(mid)?;
        if (val - target).abs() < (best.1 - target).abs() {
            best = (mid, val, report.clone());
        }
        if (val - target).abs() <= tol {
            return Ok(RateSearchResult {
                delta: mid,
                report,
                target_met: true,
            });
        }
        if val < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Staircase effects can leave a narrow bracket whose endpoints straddle
    // the target: sweep it on a fine geometric grid.
    let ratio = (hi / lo).powf(1.0 / (GRID_SCAN_POINTS as f64 + 1.0));
    let mut delta = lo;
    for _ in 0..=GRID_SCAN_POINTS {
        delta *= ratio;
        let (val, report) = ev.eval(delta)?;
        if (val - target).abs() < (best.1 - target).abs() {
            best = (delta, val, report.clone());
        }
        if (val - target).abs() <= tol {
            return Ok(RateSearchResult {
                delta,
                report,
                target_met: true,
            });
        }
    }

    let (delta, val, report) = best;
    Ok(RateSearchResult {
        delta,
        report,
        target_met: (val - target).abs() <= tol,
    })
}
