//! Hysteresis state machine turning an EAR time series into blink events.

use serde::{Deserialize, Serialize};

use super::{Ratio, SignalError};

/// Thresholds for the closure detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// EAR below this starts a closure.
    pub close_threshold: f64,
    /// EAR above this ends a closure.
    pub open_threshold: f64,
    /// Closures shorter than this are dropped as noise.
    pub min_closure_s: f64,
    /// A closure without any valid frame for longer than this is abandoned.
    pub tracking_loss_timeout_s: f64,
}

impl DetectorConfig {
    /// Gap between the close and open thresholds.
    pub const HYSTERESIS: f64 = 0.03;
    pub const FALLBACK_CLOSE: f64 = 0.21;
    pub const DEFAULT_MIN_CLOSURE_S: f64 = 0.05;
    pub const DEFAULT_TRACKING_LOSS_S: f64 = 0.5;

    /// Config with the open threshold placed one hysteresis gap above `close`.
    pub fn from_close_threshold(close: f64) -> Self {
        Self {
            close_threshold: close,
            open_threshold: close + Self::HYSTERESIS,
            min_closure_s: Self::DEFAULT_MIN_CLOSURE_S,
            tracking_loss_timeout_s: Self::DEFAULT_TRACKING_LOSS_S,
        }
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        let finite = [
            self.close_threshold,
            self.open_threshold,
            self.min_closure_s,
            self.tracking_loss_timeout_s,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(SignalError::InvalidConfig("non-finite value".into()));
        }
        if self.close_threshold < 0.0 {
            return Err(SignalError::InvalidConfig("close_threshold must be >= 0".into()));
        }
        if self.open_threshold <= self.close_threshold {
            return Err(SignalError::InvalidConfig(
                "open_threshold must exceed close_threshold".into(),
            ));
        }
        if self.min_closure_s <= 0.0 {
            return Err(SignalError::InvalidConfig("min_closure_s must be positive".into()));
        }
        if self.tracking_loss_timeout_s <= 0.0 {
            return Err(SignalError::InvalidConfig(
                "tracking_loss_timeout_s must be positive".into(),
            ));
        }
        Ok(())
    }
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self::from_close_threshold(Self::FALLBACK_CLOSE)
    }
}

/// A completed eye closure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlinkEvent {
    pub start_s: f64,
    pub end_s: f64,
    pub duration_s: f64,
}

impl BlinkEvent {
    pub fn new(start_s: f64, end_s: f64) -> Self {
        Self {
            start_s,
            end_s,
            duration_s: end_s - start_s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DetectorPhase {
    #[default]
    Open,
    Closed {
        since_s: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DetectorState {
    pub phase: DetectorPhase,
    pub last_valid_t: Option<f64>,
    /// Last timestamp fed, valid or not.
    pub last_t: Option<f64>,
}

/// Blink detector owning its state and config.
#[derive(Debug, Clone)]
pub struct BlinkDetector {
    config: DetectorConfig,
    state: DetectorState,
}

impl BlinkDetector {
    pub fn new(config: DetectorConfig) -> Result<Self, SignalError> {
        config.validate()?;
        Ok(Self {
            config,
            state: DetectorState::default(),
        })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    pub fn state(&self) -> &DetectorState {
        &self.state
    }

    /// Start time of the closure in progress, if any.
    pub fn closed_since(&self) -> Option<f64> {
        match self.state.phase {
            DetectorPhase::Closed { since_s } => Some(since_s),
            DetectorPhase::Open => None,
        }
    }

    /// Feed one frame. `ear` is `None` when tracking is lost.
    pub fn step(&mut self, t: f64, ear: Option<Ratio>) -> Result<Vec<BlinkEvent>, SignalError> {
        if let Some(previous) = self.state.last_t {
            if t < previous || t.is_nan() {
                return Err(SignalError::NonMonotonicTimestamp { t, previous });
            }
        }
        self.state.last_t = Some(t);

        // A closure that went without valid frames for too long is dropped,
        // whether the stream is still lost or has just come back.
        if let DetectorPhase::Closed { since_s } = self.state.phase {
            let last_seen = self.state.last_valid_t.unwrap_or(since_s);
            if t - last_seen > self.config.tracking_loss_timeout_s {
                log::debug!("closure since {since_s} abandoned after tracking loss");
                self.state.phase = DetectorPhase::Open;
            }
        }

        let Some(ear) = ear else {
            return Ok(Vec::new());
        };
        self.state.last_valid_t = Some(t);
        let ear = ear.value();

        let mut events = Vec::new();
        match self.state.phase {
            DetectorPhase::Open => {
                if ear < self.config.close_threshold {
                    self.state.phase = DetectorPhase::Closed { since_s: t };
                }
            }
            DetectorPhase::Closed { since_s } => {
                if ear > self.config.open_threshold {
                    self.state.phase = DetectorPhase::Open;
                    let event = BlinkEvent::new(since_s, t);
                    if event.duration_s >= self.config.min_closure_s {
                        events.push(event);
                    }
                }
            }
        }
        Ok(events)
    }

    /// End of stream. A closure still in progress is discarded.
    pub fn flush(&mut self) -> Vec<BlinkEvent> {
        self.state.phase = DetectorPhase::Open;
        Vec::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> DetectorConfig {
        DetectorConfig {
            close_threshold: 0.21,
            open_threshold: 0.24,
            min_closure_s: 0.05,
            tracking_loss_timeout_s: 0.5,
        }
    }

    fn r(v: f64) -> Option<Ratio> {
        Some(Ratio::new(v).unwrap())
    }

    fn run(det: &mut BlinkDetector, trace: &[(f64, Option<Ratio>)]) -> Vec<BlinkEvent> {
        let mut out = Vec::new();
        for &(t, ear) in trace {
            out.extend(det.step(t, ear).unwrap());
        }
        out
    }

    #[test]
    fn constant_open_trace_has_no_events() {
        let mut det = BlinkDetector::new(cfg()).unwrap();
        let trace: Vec<_> = (0..300).map(|i| (i as f64 / 30.0, r(0.35))).collect();
        assert!(run(&mut det, &trace).is_empty());
    }

    #[test]
    fn short_dip_is_filtered() {
        let mut det = BlinkDetector::new(cfg()).unwrap();
        let trace = [(1.0, r(0.35)), (1.01, r(0.10)), (1.03, r(0.35)), (1.1, r(0.35))];
        assert!(run(&mut det, &trace).is_empty());
    }

    #[test]
    fn closure_between_thresholds_keeps_closed() {
        let mut det = BlinkDetector::new(cfg()).unwrap();
        // 0.23 is inside the hysteresis band: neither opens nor closes.
        let trace = [(0.0, r(0.1)), (0.5, r(0.23)), (1.0, r(0.24)), (1.5, r(0.25))];
        assert_eq!(run(&mut det, &trace), vec![BlinkEvent::new(0.0, 1.5)]);
    }

    #[test]
    fn regressing_timestamp_is_rejected() {
        let mut det = BlinkDetector::new(cfg()).unwrap();
        det.step(2.0, r(0.3)).unwrap();
        assert!(matches!(
            det.step(1.9, r(0.3)),
            Err(SignalError::NonMonotonicTimestamp { .. })
        ));
    }

    #[test]
    fn tracking_loss_abandons_closure() {
        let mut det = BlinkDetector::new(cfg()).unwrap();
        let trace = [
            (0.0, r(0.35)),
            (1.0, r(0.1)),
            (1.2, None),
            (1.6, None),
            (1.8, None),
            (2.5, r(0.35)),
        ];
        assert!(run(&mut det, &trace).is_empty());
        assert_eq!(det.closed_since(), None);
    }

    #[test]
    fn short_tracking_gap_keeps_closure() {
        let mut det = BlinkDetector::new(cfg()).unwrap();
        let trace = [
            (0.0, r(0.35)),
            (1.0, r(0.1)),
            (1.2, None),
            (1.4, r(0.1)),
            (1.8, r(0.1)),
            (2.0, r(0.35)),
        ];
        assert_eq!(run(&mut det, &trace), vec![BlinkEvent::new(1.0, 2.0)]);
    }

    #[test]
    fn flush_discards_open_closure() {
        let mut det = BlinkDetector::new(cfg()).unwrap();
        assert!(det.flush().is_empty());
        run(&mut det, &[(5.0, r(0.1)), (5.4, r(0.1)), (5.8, r(0.1)), (6.0, r(0.1))]);
        assert_eq!(det.closed_since(), Some(5.0));
        assert!(det.flush().is_empty());
        assert_eq!(det.state().phase, DetectorPhase::Open);
    }

    #[test]
    fn config_validation() {
        assert!(DetectorConfig::default().validate().is_ok());
        let mut bad = cfg();
        bad.open_threshold = bad.close_threshold;
        assert!(BlinkDetector::new(bad).is_err());
        let mut bad = cfg();
        bad.min_closure_s = 0.0;
        assert!(bad.validate().is_err());
        let mut bad = cfg();
        bad.tracking_loss_timeout_s = -1.0;
        assert!(bad.validate().is_err());
    }
}
