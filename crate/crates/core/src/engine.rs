//! Frame-to-text pipeline: detector, classifier and decoder behind a single
//! ordered feed.
//!
//! Each frame advances the decoder clock. While the eye is closed the clock
//! is held at the start of the closure, so a long blink in progress is never
//! mistaken for a pause.

use thiserror::Error;

use crate::codec::{classify_blink, BlinkClass, CodecError, DecoderEvent, DecoderEventKind, LiveDecoder, TimingConfig};
use crate::io::EventMessage;
use crate::signal::{frame_ear, BlinkDetector, BlinkEvent, DetectorConfig, FrameSample, SignalError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// A detected blink together with how it was classified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifiedBlink {
    pub blink: BlinkEvent,
    pub class: BlinkClass,
}

#[derive(Debug, Clone)]
pub struct Engine {
    detector: BlinkDetector,
    decoder: LiveDecoder,
    first_t: Option<f64>,
    last_commit_s: Option<f64>,
    blinks: Vec<ClassifiedBlink>,
}

impl Engine {
    pub fn new(detector: DetectorConfig, timing: TimingConfig) -> Result<Self, EngineError> {
        Ok(Self {
            detector: BlinkDetector::new(detector)?,
            decoder: LiveDecoder::new(timing)?,
            first_t: None,
            last_commit_s: None,
            blinks: Vec::new(),
        })
    }

    pub fn transcript(&self) -> &str {
        self.decoder.transcript()
    }

    /// Timestamp of the first input seen.
    pub fn first_timestamp(&self) -> Option<f64> {
        self.first_t
    }

    /// Timestamp of the most recent committed letter.
    pub fn last_commit_s(&self) -> Option<f64> {
        self.last_commit_s
    }

    pub fn blinks(&self) -> &[ClassifiedBlink] {
        &self.blinks
    }

    pub fn decoder(&self) -> &LiveDecoder {
        &self.decoder
    }

    /// Feed one frame. Landmarks too degenerate for an EAR count as lost
    /// tracking for that frame.
    pub fn on_frame(&mut self, frame: &FrameSample) -> Result<Vec<EventMessage>, EngineError> {
        let t = frame.timestamp_s;
        self.first_t.get_or_insert(t);
        let ear = match frame_ear(frame) {
            Ok(ear) => ear,
            Err(SignalError::DegenerateEye) => {
                log::warn!("degenerate eye landmarks at t={t}, treating frame as lost");
                None
            }
            Err(e) => return Err(e.into()),
        };

        let mut out = Vec::new();
        for blink in self.detector.step(t, ear)? {
            self.feed_blink(&blink, &mut out)?;
        }
        let clock = self.detector.closed_since().map_or(t, |since| since.min(t));
        let ticked = self.decoder.on_tick(clock);
        self.record(ticked, &mut out);
        Ok(out)
    }

    /// Feed an already detected blink, bypassing the detector.
    pub fn on_blink(&mut self, blink: &BlinkEvent) -> Result<Vec<EventMessage>, EngineError> {
        self.first_t.get_or_insert(blink.start_s);
        let mut out = Vec::new();
        self.feed_blink(blink, &mut out)?;
        Ok(out)
    }

    pub fn on_tick(&mut self, now_s: f64) -> Vec<EventMessage> {
        let mut out = Vec::new();
        let ticked = self.decoder.on_tick(now_s);
        self.record(ticked, &mut out);
        out
    }

    /// End of stream: drop any unfinished closure and commit the pending
    /// letter.
    pub fn finish(&mut self) -> Vec<EventMessage> {
        let mut out = Vec::new();
        let dropped = self.detector.flush();
        debug_assert!(dropped.is_empty());
        let flushed = self.decoder.flush();
        self.record(flushed, &mut out);
        out
    }

    fn feed_blink(&mut self, blink: &BlinkEvent, out: &mut Vec<EventMessage>) -> Result<(), EngineError> {
        let class = classify_blink(blink.duration_s, self.decoder.config());
        let events = self.decoder.on_blink(blink)?;
        self.blinks.push(ClassifiedBlink { blink: *blink, class });
        out.push(EventMessage::Blink(*blink));
        self.record(events, out);
        Ok(())
    }

    fn record(&mut self, events: Vec<DecoderEvent>, out: &mut Vec<EventMessage>) {
        for e in events {
            if matches!(e.kind, DecoderEventKind::LetterCommitted { .. }) {
                self.last_commit_s = Some(e.at_s);
            }
            out.push(EventMessage::Decoder(e));
        }
    }
}
