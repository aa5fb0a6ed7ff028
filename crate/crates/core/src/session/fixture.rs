//! Bundled synthetic study: five participants, ten trials each ("SOS" for
//! trials 1-5, "HELP" for 6-10). Participants A-E get 7/6/6/7/6 correct
//! trials and mean response times between 18 and 20 s, D fastest and E
//! slowest.

use super::{evaluate_trial, TrialRecord};

pub const FIXTURE_PARTICIPANTS: [&str; 5] = ["A", "B", "C", "D", "E"];

struct Profile {
    id: &'static str,
    mean_ms: i64,
    /// Scales the shared learning curve, in tenths.
    spread: i64,
    incorrect: &'static [u32],
}

const PROFILES: [Profile; 5] = [
    Profile {
        id: "A",
        mean_ms: 19_000,
        spread: 10,
        incorrect: &[6, 7, 9],
    },
    Profile {
        id: "B",
        mean_ms: 19_300,
        spread: 9,
        incorrect: &[3, 6, 7, 9],
    },
    Profile {
        id: "C",
        mean_ms: 18_800,
        spread: 11,
        incorrect: &[6, 7, 8, 10],
    },
    Profile {
        id: "D",
        mean_ms: 18_200,
        spread: 8,
        incorrect: &[6, 7, 10],
    },
    Profile {
        id: "E",
        mean_ms: 19_800,
        spread: 12,
        incorrect: &[2, 6, 7, 9],
    },
];

/// Offset from the participant mean per trial, in ms. "SOS" trials run
/// below the mean; "HELP" spikes on first attempt, then improves. Sums to 0.
const CURVE_MS: [i64; 10] = [-1200, -1400, -1600, -1800, -2000, 2800, 2000, 1500, 1000, 700];

/// Pause between the end of one trial and the start signal of the next.
const REST_MS: i64 = 15_000;

const SOS_ERRORS: [&str; 2] = ["S?S", "SOI"];
const HELP_ERRORS: [&str; 4] = ["HEL?", "HELF", "HEIP", "?ELP"];

pub fn fixture_records() -> Vec<TrialRecord> {
    let mut records = Vec::with_capacity(50);
    for p in &PROFILES {
        let mut clock_ms = 0;
        let mut errors = 0;
        for trial in 1..=10u32 {
            let target = if trial <= 5 { "SOS" } else { "HELP" };
            let transcript = if p.incorrect.contains(&trial) {
                errors += 1;
                if trial <= 5 {
                    SOS_ERRORS[errors % SOS_ERRORS.len()]
                } else {
                    HELP_ERRORS[errors % HELP_ERRORS.len()]
                }
            } else {
                target
            };
            let rt_ms = p.mean_ms + CURVE_MS[trial as usize - 1] * p.spread / 10;
            let start_ms = clock_ms;
            let end_ms = start_ms + rt_ms;
            clock_ms = end_ms + REST_MS;
            let record = evaluate_trial(
                target,
                transcript,
                start_ms as f64 / 1000.0,
                end_ms as f64 / 1000.0,
                trial,
                p.id,
            )
            .expect("fixture trials end after they start");
            records.push(TrialRecord {
                response_time_s: rt_ms as f64 / 1000.0,
                ..record
            });
        }
    }
    records
}
