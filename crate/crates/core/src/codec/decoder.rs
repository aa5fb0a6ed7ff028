//! Streaming decoder: blink events and clock ticks in, letters and word
//! breaks out.
//!
//! Pause handling runs on every input (blink or tick) and is guarded so each
//! pause commits at most one letter and one word break. Feeding the same
//! blinks with any tick schedule, or none, ends in the same transcript.
//!
//! Blinks shorter than the dot minimum are reported but otherwise ignored:
//! they neither extend the pending letter nor restart the pause timer.

use serde::{Deserialize, Serialize};

use super::{classify_blink, decode_sequence, BlinkClass, CodecError, MorseSequence, MorseSymbol, TimingConfig};
use crate::signal::BlinkEvent;

/// Character committed for a sequence with no dictionary entry.
pub const INVALID_CHAR: char = '?';

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DecoderEventKind {
    SymbolAppended(MorseSymbol),
    BlinkIgnored { duration_s: f64 },
    LetterCommitted { ch: char, code: MorseSequence },
    InvalidSequence(MorseSequence),
    WordBreak,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderEvent {
    pub kind: DecoderEventKind,
    pub at_s: f64,
}

impl DecoderEvent {
    pub fn new(kind: DecoderEventKind, at_s: f64) -> Self {
        Self { kind, at_s }
    }
}

#[derive(Debug, Clone)]
pub struct LiveDecoder {
    config: TimingConfig,
    pending: MorseSequence,
    last_blink_end_s: Option<f64>,
    /// Latest timestamp seen from any input.
    last_seen_s: Option<f64>,
    /// A word break was already emitted for the current pause.
    word_break_emitted: bool,
    /// A word break was emitted but its space is not yet in the transcript;
    /// it is written in front of the next committed letter.
    word_break_pending: bool,
    transcript: String,
}

impl LiveDecoder {
    pub fn new(config: TimingConfig) -> Result<Self, CodecError> {
        config.validate()?;
        Ok(Self {
            config,
            pending: MorseSequence::new(),
            last_blink_end_s: None,
            last_seen_s: None,
            word_break_emitted: false,
            word_break_pending: false,
            transcript: String::new(),
        })
    }

    pub fn config(&self) -> &TimingConfig {
        &self.config
    }

    pub fn pending(&self) -> &MorseSequence {
        &self.pending
    }

    pub fn last_blink_end_s(&self) -> Option<f64> {
        self.last_blink_end_s
    }

    pub fn word_break_pending(&self) -> bool {
        self.word_break_pending
    }

    /// Committed letters, with single spaces between words.
    pub fn transcript(&self) -> &str {
        &self.transcript
    }

    pub fn on_blink(&mut self, blink: &BlinkEvent) -> Result<Vec<DecoderEvent>, CodecError> {
        let floor = match (self.last_blink_end_s, self.last_seen_s) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        if let Some(previous) = floor {
            if blink.start_s < previous || blink.start_s.is_nan() {
                return Err(CodecError::NonMonotonicTimestamp {
                    t: blink.start_s,
                    previous,
                });
            }
        }

        let mut events = Vec::new();
        self.apply_gap(blink.start_s, &mut events);
        self.last_seen_s = Some(blink.end_s);

        match classify_blink(blink.duration_s, &self.config) {
            BlinkClass::Ignored(duration_s) => {
                events.push(DecoderEvent::new(
                    DecoderEventKind::BlinkIgnored { duration_s },
                    blink.end_s,
                ));
            }
            class => {
                let symbol = class.symbol().expect("dot or dash");
                self.pending.push(symbol);
                self.last_blink_end_s = Some(blink.end_s);
                self.word_break_emitted = false;
                events.push(DecoderEvent::new(DecoderEventKind::SymbolAppended(symbol), blink.end_s));
            }
        }
        Ok(events)
    }

    /// Advance the clock. Ticks older than the latest input change nothing.
    pub fn on_tick(&mut self, now_s: f64) -> Vec<DecoderEvent> {
        let mut events = Vec::new();
        if self.last_seen_s.is_some_and(|seen| now_s < seen) {
            return events;
        }
        self.last_seen_s = Some(now_s);
        self.apply_gap(now_s, &mut events);
        events
    }

    /// End of session: commit whatever is pending. No trailing word break.
    pub fn flush(&mut self) -> Vec<DecoderEvent> {
        let mut events = Vec::new();
        if !self.pending.is_empty() {
            let at = self.last_seen_s.or(self.last_blink_end_s).unwrap_or(0.0);
            self.commit(at, &mut events);
        }
        self.word_break_pending = false;
        self.word_break_emitted = false;
        self.last_blink_end_s = None;
        events
    }

    fn apply_gap(&mut self, now_s: f64, events: &mut Vec<DecoderEvent>) {
        let Some(end) = self.last_blink_end_s else {
            return;
        };
        let gap = now_s - end;
        if gap > self.config.letter_gap_s && !self.pending.is_empty() {
            self.commit(now_s, events);
        }
        if gap > self.config.word_gap_s
            && !self.word_break_emitted
            && self.pending.is_empty()
            && !self.transcript.is_empty()
        {
            self.word_break_emitted = true;
            self.word_break_pending = true;
            events.push(DecoderEvent::new(DecoderEventKind::WordBreak, now_s));
        }
    }

    fn commit(&mut self, at_s: f64, events: &mut Vec<DecoderEvent>) {
        let code = std::mem::take(&mut self.pending);
        let ch = match decode_sequence(&code) {
            Some(ch) => ch,
            None => {
                events.push(DecoderEvent::new(DecoderEventKind::InvalidSequence(code.clone()), at_s));
                INVALID_CHAR
            }
        };
        if self.word_break_pending {
            self.transcript.push(' ');
            self.word_break_pending = false;
        }
        self.transcript.push(ch);
        events.push(DecoderEvent::new(DecoderEventKind::LetterCommitted { ch, code }, at_s));
    }
}
