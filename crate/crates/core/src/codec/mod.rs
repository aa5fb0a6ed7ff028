//! Morse dictionary, blink classification and the streaming timed decoder.

mod decoder;
mod morse;

pub use decoder::{DecoderEvent, DecoderEventKind, LiveDecoder, INVALID_CHAR};
pub use morse::{
    decode_sequence, encode_char, encode_message, is_supported, MessageItem, MorseSequence, MorseSymbol, MORSE_TABLE,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodecError {
    #[error("unsupported character {0:?}")]
    UnsupportedCharacter(char),
    #[error("invalid Morse code: {0}")]
    InvalidCode(String),
    #[error("timestamp {t} precedes previous timestamp {previous}")]
    NonMonotonicTimestamp { t: f64, previous: f64 },
    #[error("invalid timing config: {0}")]
    InvalidConfig(String),
}

/// Blink durations and pause lengths, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingConfig {
    /// Shortest blink counted as a dot (inclusive).
    pub dot_min_s: f64,
    /// Shortest blink counted as a dash (inclusive).
    pub dash_min_s: f64,
    /// A pause strictly longer than this commits the pending letter.
    pub letter_gap_s: f64,
    /// A pause strictly longer than this starts a new word.
    pub word_gap_s: f64,
}

impl Default for TimingConfig {
    fn default() -> Self {
        Self {
            dot_min_s: 1.0,
            dash_min_s: 2.0,
            letter_gap_s: 1.0,
            word_gap_s: 3.0,
        }
    }
}

impl TimingConfig {
    pub fn validate(&self) -> Result<(), CodecError> {
        let all = [self.dot_min_s, self.dash_min_s, self.letter_gap_s, self.word_gap_s];
        if !all.iter().all(|v| v.is_finite()) {
            return Err(CodecError::InvalidConfig("non-finite value".into()));
        }
        if !(0.0 < self.dot_min_s && self.dot_min_s < self.dash_min_s) {
            return Err(CodecError::InvalidConfig("need 0 < dot_min_s < dash_min_s".into()));
        }
        if !(0.0 < self.letter_gap_s && self.letter_gap_s < self.word_gap_s) {
            return Err(CodecError::InvalidConfig("need 0 < letter_gap_s < word_gap_s".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BlinkClass {
    Dot,
    Dash,
    Ignored(f64),
}

impl BlinkClass {
    pub fn symbol(self) -> Option<MorseSymbol> {
        match self {
            Self::Dot => Some(MorseSymbol::Dot),
            Self::Dash => Some(MorseSymbol::Dash),
            Self::Ignored(_) => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Dot => "dot",
            Self::Dash => "dash",
            Self::Ignored(_) => "ignored",
        }
    }
}

pub fn classify_blink(duration_s: f64, cfg: &TimingConfig) -> BlinkClass {
    if duration_s >= cfg.dash_min_s {
        BlinkClass::Dash
    } else if duration_s >= cfg.dot_min_s {
        BlinkClass::Dot
    } else {
        BlinkClass::Ignored(duration_s)
    }
}
