use serde::{Deserialize, Serialize};

use super::SessionError;
use crate::codec::BlinkClass;
use crate::engine::ClassifiedBlink;

/// One experimental trial: a participant trying to send `target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_no: u32,
    pub participant_id: String,
    pub target: String,
    pub transcript: String,
    pub correct: bool,
    pub response_time_s: f64,
    pub started_at_s: f64,
    pub ended_at_s: f64,
    /// Character-level Levenshtein distance between normalized target and
    /// transcript. Informational only; `correct` is a whole-message match.
    pub edit_distance: usize,
}

/// Uppercased, surrounding whitespace trimmed.
pub fn normalize_message(s: &str) -> String {
    s.trim().to_uppercase()
}

/// Scores a decoded transcript against its target. `ended_at_s` is the time
/// of the last committed letter, whether or not the trial succeeded.
pub fn evaluate_trial(
    target: &str,
    transcript: &str,
    started_at_s: f64,
    ended_at_s: f64,
    trial_no: u32,
    participant_id: &str,
) -> Result<TrialRecord, SessionError> {
    if ended_at_s.is_nan() || started_at_s.is_nan() || ended_at_s < started_at_s {
        return Err(SessionError::NegativeDuration {
            started_at_s,
            ended_at_s,
        });
    }
    let (t, d) = (normalize_message(target), normalize_message(transcript));
    Ok(TrialRecord {
        trial_no,
        participant_id: participant_id.to_string(),
        target: target.to_string(),
        transcript: transcript.to_string(),
        correct: t == d,
        response_time_s: ended_at_s - started_at_s,
        started_at_s,
        ended_at_s,
        edit_distance: strsim::levenshtein(&t, &d),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlinkLabel {
    Dot,
    Dash,
    Ignored,
}

impl BlinkLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Dot => "dot",
            Self::Dash => "dash",
            Self::Ignored => "ignored",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dot" => Some(Self::Dot),
            "dash" => Some(Self::Dash),
            "ignored" => Some(Self::Ignored),
            _ => None,
        }
    }
}

impl From<BlinkClass> for BlinkLabel {
    fn from(c: BlinkClass) -> Self {
        match c {
            BlinkClass::Dot => Self::Dot,
            BlinkClass::Dash => Self::Dash,
            BlinkClass::Ignored(_) => Self::Ignored,
        }
    }
}

/// One row of the per-blink log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlinkLogRow {
    pub trial_no: u32,
    pub participant_id: String,
    pub start_s: f64,
    pub end_s: f64,
    pub duration_s: f64,
    pub classification: BlinkLabel,
}

impl BlinkLogRow {
    pub fn from_classified(trial_no: u32, participant_id: &str, b: &ClassifiedBlink) -> Self {
        Self {
            trial_no,
            participant_id: participant_id.to_string(),
            start_s: b.blink.start_s,
            end_s: b.blink.end_s,
            duration_s: b.blink.duration_s,
            classification: b.class.into(),
        }
    }
}
