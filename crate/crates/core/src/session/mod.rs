//! Trial evaluation, CSV logs, and the study analysis and report.

mod analysis;
mod fixture;
mod log;
mod report;
mod trial;

pub use analysis::{summarize, ParticipantSummary, StudySummary};
pub use fixture::{fixture_records, FIXTURE_PARTICIPANTS};
pub use log::{
    append_blinks_csv, append_trials_csv, blinks_from_csv, blinks_to_csv, read_blinks_csv, read_trials_csv,
    trials_from_csv, trials_to_csv, write_blinks_csv, write_trials_csv, BLINKS_HEADER, TRIALS_HEADER,
};
pub use report::{emit_report, REPORT_FILES};
pub use trial::{evaluate_trial, normalize_message, BlinkLabel, BlinkLogRow, TrialRecord};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("trial ends at {ended_at_s} before it starts at {started_at_s}")]
    NegativeDuration { started_at_s: f64, ended_at_s: f64 },
    #[error("malformed CSV at line {line}: {reason}")]
    MalformedCsv { line: u64, reason: String },
    #[error("no trial records to analyze")]
    EmptyStudy,
    #[error("I/O failure: {0}")]
    IoFailure(#[from] std::io::Error),
}

/// Three decimal places, the precision used in every CSV and chart label.
pub fn fmt3(v: f64) -> String {
    format!("{v:.3}")
}
