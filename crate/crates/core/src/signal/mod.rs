//! Frame-level signal processing: EAR computation, blink detection with
//! hysteresis, and per-user threshold calibration.

mod calibrate;
mod detector;
mod ear;

pub use calibrate::{calibrate, two_cluster_split, CalibrationQuality, CalibrationReport};
pub use detector::{BlinkDetector, BlinkEvent, DetectorConfig, DetectorPhase, DetectorState};
pub use ear::{compute_ear, EyeLandmarks, Point2, Ratio};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignalError {
    #[error("degenerate eye landmarks: outer and inner corners coincide")]
    DegenerateEye,
    #[error("invalid EAR value {0}")]
    InvalidRatio(f64),
    #[error("timestamp {t} precedes previous timestamp {previous}")]
    NonMonotonicTimestamp { t: f64, previous: f64 },
    #[error("invalid detector config: {0}")]
    InvalidConfig(String),
    #[error("calibration input has no valid frames")]
    EmptyCalibration,
}

/// One timestamped observation from the capture side.
///
/// A frame with no eyes and no override marks lost tracking.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FrameSample {
    pub timestamp_s: f64,
    pub left: Option<EyeLandmarks>,
    pub right: Option<EyeLandmarks>,
    pub ear_override: Option<Ratio>,
}

impl FrameSample {
    pub fn with_ear(timestamp_s: f64, ear: Ratio) -> Self {
        Self {
            timestamp_s,
            ear_override: Some(ear),
            ..Self::default()
        }
    }

    pub fn tracking_lost(timestamp_s: f64) -> Self {
        Self {
            timestamp_s,
            ..Self::default()
        }
    }

    pub fn is_tracking_lost(&self) -> bool {
        self.left.is_none() && self.right.is_none() && self.ear_override.is_none()
    }
}

/// EAR for a whole frame: the override if present, else the mean over the
/// eyes present, else `None`.
pub fn frame_ear(frame: &FrameSample) -> Result<Option<Ratio>, SignalError> {
    if let Some(ear) = frame.ear_override {
        return Ok(Some(ear));
    }
    let values = [frame.left.as_ref(), frame.right.as_ref()]
        .into_iter()
        .flatten()
        .map(compute_ear)
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Ok(None);
    }
    let mean = values.iter().map(|r| r.value()).sum::<f64>() / values.len() as f64;
    Ok(Some(Ratio::new(mean)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Eye with width 1 and both lid gaps equal to `ear`.
    fn eye_with_ear(ear: f64) -> EyeLandmarks {
        let h = ear / 2.0;
        EyeLandmarks::new([
            Point2::new(0.0, 0.0),
            Point2::new(0.25, h),
            Point2::new(0.75, h),
            Point2::new(1.0, 0.0),
            Point2::new(0.75, -h),
            Point2::new(0.25, -h),
        ])
    }

    #[test]
    fn both_eyes_are_averaged() {
        let f = FrameSample {
            timestamp_s: 0.0,
            left: Some(eye_with_ear(0.30)),
            right: Some(eye_with_ear(0.50)),
            ear_override: None,
        };
        let ear = frame_ear(&f).unwrap().unwrap().value();
        assert!((ear - 0.40).abs() < 1e-12);
    }

    #[test]
    fn single_eye_fallback() {
        let f = FrameSample {
            left: Some(eye_with_ear(0.30)),
            ..FrameSample::default()
        };
        let ear = frame_ear(&f).unwrap().unwrap().value();
        assert!((ear - 0.30).abs() < 1e-12);
    }

    #[test]
    fn override_passes_through() {
        let f = FrameSample::with_ear(1.0, Ratio::new(0.22).unwrap());
        assert_eq!(frame_ear(&f).unwrap().unwrap().value(), 0.22);
    }

    #[test]
    fn no_eyes_is_absent() {
        let f = FrameSample::tracking_lost(3.0);
        assert!(f.is_tracking_lost());
        assert_eq!(frame_ear(&f).unwrap(), None);
    }

    #[test]
    fn degenerate_eye_propagates() {
        let mut bad = eye_with_ear(0.3);
        bad.points[3] = bad.points[0];
        let f = FrameSample {
            left: Some(eye_with_ear(0.3)),
            right: Some(bad),
            ..FrameSample::default()
        };
        assert_eq!(frame_ear(&f), Err(SignalError::DegenerateEye));
    }
}
