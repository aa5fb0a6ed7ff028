//! Deterministic blink simulator: turns a message into the blink schedule
//! and EAR trace a practiced user would produce.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{encode_message, CodecError, MessageItem, MorseSymbol, TimingConfig};
use crate::signal::{BlinkEvent, FrameSample, Ratio};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("invalid simulator profile: {0}")]
    InvalidProfile(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimProfile {
    pub dot_s: f64,
    pub dash_s: f64,
    /// Pause between symbols of one letter.
    pub intra_gap_s: f64,
    pub letter_gap_s: f64,
    pub word_gap_s: f64,
    pub open_ear: f64,
    pub closed_ear: f64,
    pub fps: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SimProfile {
    fn default() -> Self {
        Self {
            dot_s: 1.2,
            dash_s: 2.2,
            intra_gap_s: 0.4,
            letter_gap_s: 1.4,
            word_gap_s: 3.5,
            open_ear: 0.32,
            closed_ear: 0.08,
            fps: 30.0,
            noise_sigma: 0.0,
            seed: 1,
        }
    }
}

impl SimProfile {
    /// Checks the profile produces blinks and pauses the decoder will read
    /// back as intended under `timing`.
    pub fn validate(&self, timing: &TimingConfig) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidProfile(m.into()));
        let values = [
            self.dot_s,
            self.dash_s,
            self.intra_gap_s,
            self.letter_gap_s,
            self.word_gap_s,
            self.open_ear,
            self.closed_ear,
            self.fps,
            self.noise_sigma,
        ];
        if !values.iter().all(|v| v.is_finite()) {
            return bad("non-finite value");
        }
        if !(timing.dot_min_s <= self.dot_s && self.dot_s < timing.dash_min_s) {
            return bad("dot_s must lie in [dot_min_s, dash_min_s)");
        }
        if self.dash_s < timing.dash_min_s {
            return bad("dash_s must be at least dash_min_s");
        }
        if !(0.0 < self.intra_gap_s && self.intra_gap_s <= timing.letter_gap_s) {
            return bad("intra_gap_s must be positive and at most the letter gap threshold");
        }
        if self.letter_gap_s <= timing.letter_gap_s || self.letter_gap_s > timing.word_gap_s {
            return bad("letter_gap_s must exceed the letter gap threshold without reaching a word gap");
        }
        if self.word_gap_s <= timing.word_gap_s {
            return bad("word_gap_s must exceed the word gap threshold");
        }
        if self.fps <= 0.0 || self.noise_sigma < 0.0 || self.closed_ear < 0.0 {
            return bad("fps must be positive, noise and EAR values non-negative");
        }
        if self.closed_ear >= self.open_ear {
            return bad("closed_ear must be below open_ear");
        }
        Ok(())
    }

    fn symbol_s(&self, s: MorseSymbol) -> f64 {
        match s {
            MorseSymbol::Dot => self.dot_s,
            MorseSymbol::Dash => self.dash_s,
        }
    }
}

/// Blink schedule for `message`, starting at t = 0.
pub fn simulate_blink_events(message: &str, profile: &SimProfile) -> Result<Vec<BlinkEvent>, SimError> {
    let items = encode_message(message)?;
    let mut events = Vec::new();
    let mut t = 0.0;
    // Pause owed before the next symbol.
    let mut pause: Option<f64> = None;
    for item in items {
        match item {
            MessageItem::WordBoundary => pause = Some(profile.word_gap_s),
            MessageItem::Letter(_, code) => {
                for (i, &symbol) in code.symbols().iter().enumerate() {
                    if i > 0 {
                        t += profile.intra_gap_s;
                    } else if let Some(p) = pause {
                        t += p;
                    }
                    let start = t;
                    t += profile.symbol_s(symbol);
                    events.push(BlinkEvent::new(start, t));
                }
                pause = Some(profile.letter_gap_s);
            }
        }
    }
    Ok(events)
}

/// End time of the last blink, or 0 for an empty message.
pub fn message_duration(message: &str, profile: &SimProfile) -> Result<f64, SimError> {
    Ok(simulate_blink_events(message, profile)?.last().map_or(0.0, |b| b.end_s))
}

/// Schedule times are sums of decimal durations; frame times within this
/// of a blink edge count as on the edge.
const TIME_EPS: f64 = 1e-9;

/// Frames sampled at `profile.fps` from t = 0 through the end of the last
/// blink. Frames inside a blink (start inclusive, end exclusive) read
/// `closed_ear`, all others `open_ear`, plus seeded Gaussian noise.
pub fn simulate_ear_trace(message: &str, profile: &SimProfile) -> Result<Vec<FrameSample>, SimError> {
    if profile.fps.is_nan() || profile.fps <= 0.0 || profile.noise_sigma.is_nan() || profile.noise_sigma < 0.0 {
        return Err(SimError::InvalidProfile(
            "fps must be positive and noise non-negative".into(),
        ));
    }
    let blinks = simulate_blink_events(message, profile)?;
    let total = blinks.last().map_or(0.0, |b| b.end_s);
    let n_frames = (total * profile.fps - TIME_EPS * profile.fps).ceil().max(0.0) as usize + 1;

    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let noise = Normal::new(0.0, profile.noise_sigma).map_err(|e| SimError::InvalidProfile(e.to_string()))?;

    let mut next = 0;
    let mut frames = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        let t = i as f64 / profile.fps;
        while next < blinks.len() && blinks[next].end_s - TIME_EPS <= t {
            next += 1;
        }
        let closed = blinks.get(next).is_some_and(|b| b.start_s - TIME_EPS <= t);
        let base = if closed { profile.closed_ear } else { profile.open_ear };
        let ear = if profile.noise_sigma > 0.0 {
            base + noise.sample(&mut rng)
        } else {
            base
        };
        let ear = Ratio::new(ear.max(0.0)).expect("finite and clamped");
        frames.push(FrameSample::with_ear(t, ear));
    }
    Ok(frames)
}
