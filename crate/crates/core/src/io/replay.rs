//! Reading recorded frame and event streams back, line by line.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::thread;
use std::time::{Duration, Instant};

use super::protocol::{parse_event_line, parse_frame_line, EventMessage, ProtocolError};
use super::IoError;
use crate::signal::FrameSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReplayMode {
    Frames,
    Events,
}

/// Iterator over protocol lines of a reader. Blank lines are skipped; parse
/// errors carry the 1-based line number.
pub struct LineReader<R, T> {
    reader: R,
    line_no: usize,
    buf: String,
    parse: fn(&str) -> Result<T, ProtocolError>,
}

pub type FrameReader<R> = LineReader<R, FrameSample>;
pub type EventReader<R> = LineReader<R, EventMessage>;

impl<R: BufRead> LineReader<R, FrameSample> {
    pub fn frames(reader: R) -> Self {
        Self {
            reader,
            line_no: 0,
            buf: String::new(),
            parse: parse_frame_line,
        }
    }
}

impl<R: BufRead> LineReader<R, EventMessage> {
    pub fn events(reader: R) -> Self {
        Self {
            reader,
            line_no: 0,
            buf: String::new(),
            parse: parse_event_line,
        }
    }
}

impl<R: BufRead, T> Iterator for LineReader<R, T> {
    type Item = Result<T, IoError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(IoError::Io(e))),
            }
            self.line_no += 1;
            if self.buf.trim().is_empty() {
                continue;
            }
            return Some((self.parse)(&self.buf).map_err(|e| IoError::Protocol(e.at_line(self.line_no))));
        }
    }
}

pub fn open_frames(path: &Path) -> Result<FrameReader<BufReader<File>>, IoError> {
    Ok(LineReader::frames(BufReader::new(File::open(path)?)))
}

pub fn open_events(path: &Path) -> Result<EventReader<BufReader<File>>, IoError> {
    Ok(LineReader::events(BufReader::new(File::open(path)?)))
}

/// Reads a whole frame file.
pub fn read_frames(path: &Path) -> Result<Vec<FrameSample>, IoError> {
    open_frames(path)?.collect()
}

/// Reads a whole event file.
pub fn read_events(path: &Path) -> Result<Vec<EventMessage>, IoError> {
    open_events(path)?.collect()
}

/// Sleeps so that stream timestamps play back at wall-clock speed. Only
/// used for demos; decoding never depends on it.
#[derive(Debug)]
pub struct Pacer {
    origin: Option<(Instant, f64)>,
}

impl Pacer {
    pub fn new() -> Self {
        Self { origin: None }
    }

    pub fn wait_until(&mut self, t: f64) {
        let (start, t0) = *self.origin.get_or_insert((Instant::now(), t));
        let target = start + Duration::from_secs_f64((t - t0).max(0.0));
        let now = Instant::now();
        if target > now {
            thread::sleep(target - now);
        }
    }
}

impl Default for Pacer {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn frames_in_order_and_blank_lines_skipped() {
        let text = "{\"t\":0.0,\"ear\":0.3}\n\n{\"t\":0.5,\"ear\":0.1}\n";
        let frames: Vec<_> = LineReader::frames(Cursor::new(text)).collect::<Result<_, _>>().unwrap();
        assert_eq!(frames.len(), 2);
        assert_eq!(frames[1].timestamp_s, 0.5);
    }

    #[test]
    fn error_names_line() {
        let mut text = String::new();
        for i in 0..6 {
            text.push_str(&format!("{{\"t\":{i},\"ear\":0.3}}\n"));
        }
        text.push_str("{\"t\":6,\"ear\":\n");
        let err = LineReader::frames(Cursor::new(text))
            .collect::<Result<Vec<_>, _>>()
            .unwrap_err();
        match err {
            IoError::Protocol(p) => {
                assert_eq!(p.line, Some(7));
                assert!(p.to_string().starts_with("line 7"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            open_frames(Path::new("/nonexistent/frames.jsonl")),
            Err(IoError::Io(_))
        ));
    }

    #[test]
    fn pacer_does_not_sleep_for_past_times() {
        let mut p = Pacer::new();
        let start = Instant::now();
        p.wait_until(5.0);
        p.wait_until(4.0);
        p.wait_until(5.01);
        assert!(start.elapsed() < Duration::from_millis(500));
    }
}
