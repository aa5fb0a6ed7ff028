//! `trials.csv` and `blinks.csv`: fixed column order, header always present,
//! LF line endings, reals with three decimals. Files are replaced atomically.

use std::fs;
use std::io::{ErrorKind, Write};
use std::path::Path;

use super::trial::{normalize_message, BlinkLabel, BlinkLogRow, TrialRecord};
use super::{fmt3, SessionError};

pub const TRIALS_HEADER: [&str; 9] = [
    "trial_no",
    "participant_id",
    "target",
    "transcript",
    "correct",
    "response_time_s",
    "started_at_s",
    "ended_at_s",
    "edit_distance",
];

pub const BLINKS_HEADER: [&str; 6] = [
    "trial_no",
    "participant_id",
    "start_s",
    "end_s",
    "duration_s",
    "classification",
];

/// Derived durations may differ from their endpoints by one rounding step
/// of each of the three serialized values.
const DERIVED_TOLERANCE_S: f64 = 0.0015;

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, SessionError> {
    w.into_inner().map_err(|e| SessionError::IoFailure(e.into_error()))
}

fn csv_io(e: csv::Error) -> SessionError {
    SessionError::IoFailure(std::io::Error::other(e))
}

/// Writes `bytes` to a temporary file next to `path` and renames it over.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), SessionError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| SessionError::IoFailure(e.error))?;
    Ok(())
}

pub fn trials_to_csv(records: &[TrialRecord]) -> Result<Vec<u8>, SessionError> {
    let mut w = writer();
    w.write_record(TRIALS_HEADER).map_err(csv_io)?;
    for r in records {
        w.write_record([
            r.trial_no.to_string(),
            r.participant_id.clone(),
            r.target.clone(),
            r.transcript.clone(),
            r.correct.to_string(),
            fmt3(r.response_time_s),
            fmt3(r.started_at_s),
            fmt3(r.ended_at_s),
            r.edit_distance.to_string(),
        ])
        .map_err(csv_io)?;
    }
    finish(w)
}

pub fn write_trials_csv(path: &Path, records: &[TrialRecord]) -> Result<(), SessionError> {
    write_atomic(path, &trials_to_csv(records)?)
}

/// Adds `records` to the file at `path`, creating it if needed.
pub fn append_trials_csv(path: &Path, records: &[TrialRecord]) -> Result<(), SessionError> {
    let mut all = read_existing(path, read_trials_csv)?;
    all.extend_from_slice(records);
    write_trials_csv(path, &all)
}

fn read_existing<T>(path: &Path, read: fn(&Path) -> Result<Vec<T>, SessionError>) -> Result<Vec<T>, SessionError> {
    match read(path) {
        Err(SessionError::IoFailure(e)) if e.kind() == ErrorKind::NotFound => Ok(Vec::new()),
        other => other,
    }
}

struct Row<'a> {
    record: &'a csv::StringRecord,
    line: u64,
}

impl Row<'_> {
    fn err(&self, reason: impl Into<String>) -> SessionError {
        SessionError::MalformedCsv {
            line: self.line,
            reason: reason.into(),
        }
    }

    fn field(&self, i: usize, name: &str) -> Result<&str, SessionError> {
        self.record
            .get(i)
            .ok_or_else(|| self.err(format!("missing column {name}")))
    }

    fn real(&self, i: usize, name: &str) -> Result<f64, SessionError> {
        let s = self.field(i, name)?;
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err(format!("{name}: expected a finite number, got {s:?}"))),
        }
    }

    fn int<T: std::str::FromStr>(&self, i: usize, name: &str) -> Result<T, SessionError> {
        let s = self.field(i, name)?;
        s.parse()
            .map_err(|_| self.err(format!("{name}: expected a non-negative integer, got {s:?}")))
    }
}

/// Parses CSV text with the given header, handing each row to `parse_row`.
fn parse_table<T>(
    bytes: &[u8],
    header: &[&str],
    mut parse_row: impl FnMut(&Row<'_>) -> Result<T, SessionError>,
) -> Result<Vec<T>, SessionError> {
    if bytes.is_empty() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes);
    let mut out = Vec::new();
    let mut seen_header = false;
    for result in reader.records() {
        let record = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            SessionError::MalformedCsv {
                line,
                reason: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row = Row { record: &record, line };
        if !seen_header {
            if record.iter().ne(header.iter().copied()) {
                return Err(row.err(format!("expected header {}", header.join(","))));
            }
            seen_header = true;
            continue;
        }
        if record.len() != header.len() {
            return Err(row.err(format!("expected {} columns, got {}", header.len(), record.len())));
        }
        out.push(parse_row(&row)?);
    }
    Ok(out)
}

pub fn trials_from_csv(bytes: &[u8]) -> Result<Vec<TrialRecord>, SessionError> {
    parse_table(bytes, &TRIALS_HEADER, |row| {
        let trial_no: u32 = row.int(0, "trial_no")?;
        if trial_no == 0 {
            return Err(row.err("trial_no is 1-based"));
        }
        let correct = match row.field(4, "correct")? {
            "true" => true,
            "false" => false,
            other => return Err(row.err(format!("correct must be true or false, got {other:?}"))),
        };
        let record = TrialRecord {
            trial_no,
            participant_id: row.field(1, "participant_id")?.to_string(),
            target: row.field(2, "target")?.to_string(),
            transcript: row.field(3, "transcript")?.to_string(),
            correct,
            response_time_s: row.real(5, "response_time_s")?,
            started_at_s: row.real(6, "started_at_s")?,
            ended_at_s: row.real(7, "ended_at_s")?,
            edit_distance: row.int(8, "edit_distance")?,
        };
        if record.response_time_s < 0.0 {
            return Err(row.err("response_time_s is negative"));
        }
        let span = record.ended_at_s - record.started_at_s;
        if (span - record.response_time_s).abs() > DERIVED_TOLERANCE_S {
            return Err(row.err("response_time_s does not match ended_at_s - started_at_s"));
        }
        if record.correct != (normalize_message(&record.target) == normalize_message(&record.transcript)) {
            return Err(row.err("correct flag disagrees with target and transcript"));
        }
        Ok(record)
    })
}

pub fn read_trials_csv(path: &Path) -> Result<Vec<TrialRecord>, SessionError> {
    trials_from_csv(&fs::read(path)?)
}

pub fn blinks_to_csv(rows: &[BlinkLogRow]) -> Result<Vec<u8>, SessionError> {
    let mut w = writer();
    w.write_record(BLINKS_HEADER).map_err(csv_io)?;
    for r in rows {
        w.write_record([
            r.trial_no.to_string(),
            r.participant_id.clone(),
            fmt3(r.start_s),
            fmt3(r.end_s),
            fmt3(r.duration_s),
            r.classification.as_str().to_string(),
        ])
        .map_err(csv_io)?;
    }
    finish(w)
}

pub fn write_blinks_csv(path: &Path, rows: &[BlinkLogRow]) -> Result<(), SessionError> {
    write_atomic(path, &blinks_to_csv(rows)?)
}

pub fn append_blinks_csv(path: &Path, rows: &[BlinkLogRow]) -> Result<(), SessionError> {
    let mut all = read_existing(path, read_blinks_csv)?;
    all.extend_from_slice(rows);
    write_blinks_csv(path, &all)
}

pub fn blinks_from_csv(bytes: &[u8]) -> Result<Vec<BlinkLogRow>, SessionError> {
    parse_table(bytes, &BLINKS_HEADER, |row| {
        let classification = row.field(5, "classification")?;
        let r = BlinkLogRow {
            trial_no: row.int(0, "trial_no")?,
            participant_id: row.field(1, "participant_id")?.to_string(),
            start_s: row.real(2, "start_s")?,
            end_s: row.real(3, "end_s")?,
            duration_s: row.real(4, "duration_s")?,
            classification: BlinkLabel::parse(classification)
                .ok_or_else(|| row.err(format!("unknown classification {classification:?}")))?,
        };
        if r.duration_s.is_nan() || r.duration_s <= 0.0 {
            return Err(row.err("duration_s must be positive"));
        }
        if (r.end_s - r.start_s - r.duration_s).abs() > DERIVED_TOLERANCE_S {
            return Err(row.err("duration_s does not match end_s - start_s"));
        }
        Ok(r)
    })
}

pub fn read_blinks_csv(path: &Path) -> Result<Vec<BlinkLogRow>, SessionError> {
    blinks_from_csv(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::evaluate_trial;

    fn sample(n: u32) -> Vec<TrialRecord> {
        (1..=n)
            .map(|i| {
                let target = if i % 2 == 0 { "HELP" } else { "SOS" };
                let transcript = if i % 3 == 0 { "HEL?" } else { target };
                let start = i as f64 * 30.0;
                evaluate_trial(target, transcript, start, start + 18.25 + i as f64 / 8.0, i, "P,1").unwrap()
            })
            .collect()
    }

    #[test]
    fn round_trip_fifty() {
        let records = sample(50);
        let bytes = trials_to_csv(&records).unwrap();
        assert_eq!(trials_from_csv(&bytes).unwrap(), records);
    }

    #[test]
    fn header_and_line_endings() {
        let bytes = trials_to_csv(&sample(1)).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.starts_with(
            "trial_no,participant_id,target,transcript,correct,response_time_s,started_at_s,ended_at_s,edit_distance\n"
        ));
        assert!(!text.contains('\r'));
        assert!(text.contains("1,\"P,1\",SOS,SOS,true,18.375,30.000,48.375,0\n"));
    }

    #[test]
    fn header_only_is_empty() {
        let text = TRIALS_HEADER.join(",") + "\n";
        assert!(trials_from_csv(text.as_bytes()).unwrap().is_empty());
        assert!(trials_from_csv(b"").unwrap().is_empty());
    }

    #[test]
    fn rejects_non_boolean() {
        let text = TRIALS_HEADER.join(",") + "\n1,A,SOS,SOS,yes,19.000,0.000,19.000,0\n";
        match trials_from_csv(text.as_bytes()) {
            Err(SessionError::MalformedCsv { line, reason }) => {
                assert_eq!(line, 2);
                assert!(reason.contains("correct"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_rows() {
        let h = TRIALS_HEADER.join(",");
        for row in [
            "1,A,SOS,SOS,true,19.000,0.000,19.000",
            "0,A,SOS,SOS,true,19.000,0.000,19.000,0",
            "1,A,SOS,SOS,true,abc,0.000,19.000,0",
            "1,A,SOS,SOS,true,12.000,0.000,19.000,0",
            "1,A,SOS,SOX,true,19.000,0.000,19.000,1",
        ] {
            let text = format!("{h}\n{row}\n");
            assert!(
                matches!(
                    trials_from_csv(text.as_bytes()),
                    Err(SessionError::MalformedCsv { line: 2, .. })
                ),
                "{row}"
            );
        }
        assert!(matches!(
            trials_from_csv(b"trial,participant\n"),
            Err(SessionError::MalformedCsv { line: 1, .. })
        ));
    }

    #[test]
    fn blinks_round_trip_and_append() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("blinks.csv");
        let row = |s: f64, e: f64, c| BlinkLogRow {
            trial_no: 1,
            participant_id: "A".into(),
            start_s: s,
            end_s: e,
            duration_s: e - s,
            classification: c,
        };
        append_blinks_csv(&path, &[row(0.0, 1.25, BlinkLabel::Dot)]).unwrap();
        append_blinks_csv(
            &path,
            &[row(1.75, 4.0, BlinkLabel::Dash), row(4.5, 4.75, BlinkLabel::Ignored)],
        )
        .unwrap();
        let back = read_blinks_csv(&path).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back[1].classification, BlinkLabel::Dash);
        assert_eq!(back[2], row(4.5, 4.75, BlinkLabel::Ignored));
    }

    #[test]
    fn append_trials_creates_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trials.csv");
        let records = sample(3);
        append_trials_csv(&path, &records[..1]).unwrap();
        append_trials_csv(&path, &records[1..]).unwrap();
        assert_eq!(read_trials_csv(&path).unwrap(), records);
    }
}
