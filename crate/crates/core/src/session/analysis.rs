use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{SessionError, TrialRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantSummary {
    pub participant_id: String,
    pub n_trials: usize,
    pub mean_response_time_s: f64,
    pub n_correct: usize,
    pub n_incorrect: usize,
    pub accuracy_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    /// Sorted by participant id.
    pub participants: Vec<ParticipantSummary>,
    pub overall_accuracy_pct: f64,
    /// Every trial number that occurs, ascending.
    pub trial_numbers: Vec<u32>,
    /// Per participant (same order as `participants`), the response time for
    /// each entry of `trial_numbers`, or `None` if that trial is missing.
    pub response_by_trial: Vec<Vec<Option<f64>>>,
}

impl StudySummary {
    pub fn participant(&self, id: &str) -> Option<&ParticipantSummary> {
        self.participants.iter().find(|p| p.participant_id == id)
    }

    /// Participant with the lowest mean response time.
    pub fn fastest(&self) -> Option<&ParticipantSummary> {
        self.participants
            .iter()
            .min_by(|a, b| a.mean_response_time_s.total_cmp(&b.mean_response_time_s))
    }

    pub fn slowest(&self) -> Option<&ParticipantSummary> {
        self.participants
            .iter()
            .max_by(|a, b| a.mean_response_time_s.total_cmp(&b.mean_response_time_s))
    }
}

/// Order-independent mean: values are summed in sorted order.
fn mean(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn summarize(records: &[TrialRecord]) -> Result<StudySummary, SessionError> {
    if records.is_empty() {
        return Err(SessionError::EmptyStudy);
    }
    let mut by_participant: BTreeMap<&str, Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        by_participant.entry(&r.participant_id).or_default().push(r);
    }
    let mut trial_numbers: Vec<u32> = records.iter().map(|r| r.trial_no).collect();
    trial_numbers.sort_unstable();
    trial_numbers.dedup();

    let mut participants = Vec::new();
    let mut response_by_trial = Vec::new();
    for (id, trials) in &by_participant {
        let n_correct = trials.iter().filter(|r| r.correct).count();
        let mut times: Vec<f64> = trials.iter().map(|r| r.response_time_s).collect();
        participants.push(ParticipantSummary {
            participant_id: id.to_string(),
            n_trials: trials.len(),
            mean_response_time_s: mean(&mut times),
            n_correct,
            n_incorrect: trials.len() - n_correct,
            accuracy_pct: 100.0 * n_correct as f64 / trials.len() as f64,
        });

        let mut per_trial: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
        for r in trials {
            per_trial.entry(r.trial_no).or_default().push(r.response_time_s);
        }
        response_by_trial.push(
            trial_numbers
                .iter()
                .map(|n| per_trial.get_mut(n).map(|v| mean(v)))
                .collect(),
        );
    }

    let total_correct: usize = participants.iter().map(|p| p.n_correct).sum();
    Ok(StudySummary {
        participants,
        overall_accuracy_pct: 100.0 * total_correct as f64 / records.len() as f64,
        trial_numbers,
        response_by_trial,
    })
}
