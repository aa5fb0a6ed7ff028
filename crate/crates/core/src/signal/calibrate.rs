//! Per-user threshold calibration.
//!
//! The EAR values of a short recording are split into an open and a closed
//! mode by the 1-D two-cluster partition with the least within-cluster sum
//! of squares. The close threshold sits halfway between the two medians.

use serde::{Deserialize, Serialize};

use super::{frame_ear, BlinkDetector, DetectorConfig, FrameSample, Ratio, SignalError};

/// Fewer detected closures than this marks the calibration insufficient.
pub const MIN_CLOSURES: usize = 3;
/// Open and closed medians closer than this mark the calibration unusable.
pub const MIN_SEPARATION: f64 = 0.08;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationQuality {
    Ok,
    InsufficientClosures,
    LowSeparation,
}

impl CalibrationQuality {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::InsufficientClosures => "insufficient_closures",
            Self::LowSeparation => "low_separation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub open_median: Ratio,
    pub closed_median: Ratio,
    pub config: DetectorConfig,
    pub n_frames: usize,
    pub n_closures: usize,
    pub quality: CalibrationQuality,
}

/// Index `k` splitting sorted `values` into `[..k]` and `[k..]` with the
/// smallest total within-cluster sum of squares. Ties keep the lowest `k`.
///
/// Returns `None` when fewer than two values are given.
pub fn two_cluster_split(sorted: &[f64]) -> Option<usize> {
    let n = sorted.len();
    if n < 2 {
        return None;
    }
    let mut sum = vec![0.0; n + 1];
    let mut sum_sq = vec![0.0; n + 1];
    for (i, &v) in sorted.iter().enumerate() {
        sum[i + 1] = sum[i] + v;
        sum_sq[i + 1] = sum_sq[i] + v * v;
    }
    let sse = |lo: usize, hi: usize| {
        let count = (hi - lo) as f64;
        let s = sum[hi] - sum[lo];
        ((sum_sq[hi] - sum_sq[lo]) - s * s / count).max(0.0)
    };
    let mut best = (f64::INFINITY, 1);
    for k in 1..n {
        let cost = sse(0, k) + sse(k, n);
        if cost < best.0 {
            best = (cost, k);
        }
    }
    Some(best.1)
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Derive detector thresholds from a calibration recording.
///
/// Frames without a usable EAR (tracking lost or degenerate landmarks) are
/// skipped.
pub fn calibrate(frames: &[FrameSample]) -> Result<CalibrationReport, SignalError> {
    let samples: Vec<(f64, Ratio)> = frames
        .iter()
        .filter_map(|f| match frame_ear(f) {
            Ok(Some(ear)) => Some((f.timestamp_s, ear)),
            _ => None,
        })
        .collect();
    if samples.is_empty() {
        return Err(SignalError::EmptyCalibration);
    }

    let mut values: Vec<f64> = samples.iter().map(|(_, r)| r.value()).collect();
    values.sort_by(f64::total_cmp);
    let (closed_median, open_median) = match two_cluster_split(&values) {
        Some(k) => (median(&values[..k]), median(&values[k..])),
        None => (values[0], values[0]),
    };

    let config = DetectorConfig::from_close_threshold((open_median + closed_median) / 2.0);
    config.validate()?;
    let mut detector = BlinkDetector::new(config)?;
    let mut n_closures = 0;
    for &(t, ear) in &samples {
        n_closures += detector.step(t, Some(ear))?.len();
    }

    let quality = if n_closures < MIN_CLOSURES {
        CalibrationQuality::InsufficientClosures
    } else if open_median - closed_median < MIN_SEPARATION {
        CalibrationQuality::LowSeparation
    } else {
        CalibrationQuality::Ok
    };

    Ok(CalibrationReport {
        open_median: Ratio::new(open_median)?,
        closed_median: Ratio::new(closed_median)?,
        config,
        n_frames: samples.len(),
        n_closures,
        quality,
    })
}
