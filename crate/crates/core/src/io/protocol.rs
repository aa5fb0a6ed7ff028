//! Line-delimited JSON protocol for frames (producer to engine) and events
//! (engine to consumers). One object per line, UTF-8, LF.
//!
//! Frame lines:
//!
//! ```text
//! {"t":1.000,"ear":0.31}
//! {"t":1.033,"left":[[0.30,0.50],[0.33,0.48],[0.37,0.47],[0.40,0.50],[0.37,0.52],[0.33,0.52]]}
//! {"t":1.066}                      (tracking lost)
//! ```
//!
//! Event lines:
//!
//! ```text
//! {"event":"letter","char":"S","code":"...","t":11.050}
//! ```

use std::fmt::Write as _;

use serde::Deserialize;
use thiserror::Error;

use crate::codec::{DecoderEvent, DecoderEventKind, MorseSequence, MorseSymbol, INVALID_CHAR};
use crate::signal::{BlinkEvent, EyeLandmarks, FrameSample, Point2, Ratio};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}byte {offset}: {reason}", line.map(|l| format!("line {l}, ")).unwrap_or_default())]
pub struct ProtocolError {
    /// 1-based line number when reading from a file or stream.
    pub line: Option<usize>,
    /// Byte offset within the line.
    pub offset: usize,
    pub reason: String,
}

impl ProtocolError {
    pub fn new(offset: usize, reason: impl Into<String>) -> Self {
        Self {
            line: None,
            offset,
            reason: reason.into(),
        }
    }

    pub fn at_line(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }

    fn from_json(err: serde_json::Error) -> Self {
        Self::new(err.column().saturating_sub(1), err.to_string())
    }
}

/// Anything the engine writes on its output stream.
#[derive(Debug, Clone, PartialEq)]
pub enum EventMessage {
    Blink(BlinkEvent),
    Decoder(DecoderEvent),
}

impl From<DecoderEvent> for EventMessage {
    fn from(e: DecoderEvent) -> Self {
        Self::Decoder(e)
    }
}

impl From<BlinkEvent> for EventMessage {
    fn from(e: BlinkEvent) -> Self {
        Self::Blink(e)
    }
}

/// Timestamps print with millisecond precision when that loses nothing,
/// otherwise with the shortest exact representation.
pub fn format_number(v: f64) -> String {
    let fixed = format!("{v:.3}");
    if fixed.parse::<f64>() == Ok(v) {
        fixed
    } else {
        format!("{v}")
    }
}

/// Prepends a `0` to numbers written with a bare leading dot (`.30`), which
/// some producers emit but JSON forbids. String contents are left alone.
fn normalize_leading_dots(line: &str) -> std::borrow::Cow<'_, str> {
    if !line.contains('.') {
        return line.into();
    }
    let mut out = String::with_capacity(line.len() + 8);
    let mut in_string = false;
    let mut escaped = false;
    let mut prev_significant = ' ';
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        if in_string {
            out.push(c);
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
            continue;
        }
        if c == '"' {
            in_string = true;
        } else if c == '.'
            && matches!(prev_significant, '[' | ',' | ':' | '-')
            && chars.peek().is_some_and(|n| n.is_ascii_digit())
        {
            out.push('0');
        }
        out.push(c);
        if !c.is_whitespace() {
            prev_significant = c;
        }
    }
    out.into()
}

#[derive(Deserialize)]
struct RawFrame {
    t: Option<f64>,
    ear: Option<f64>,
    left: Option<Vec<[f64; 2]>>,
    right: Option<Vec<[f64; 2]>>,
    /// `false` marks a frame where no face was found.
    face: Option<bool>,
    event: Option<serde::de::IgnoredAny>,
}

fn eye_from_raw(points: Vec<[f64; 2]>, which: &str) -> Result<EyeLandmarks, ProtocolError> {
    let points: [[f64; 2]; 6] = points
        .try_into()
        .map_err(|p: Vec<_>| ProtocolError::new(0, format!("{which} eye needs 6 points, got {}", p.len())))?;
    let points = points.map(Point2::from);
    if !points.iter().all(|p| p.is_finite()) {
        return Err(ProtocolError::new(0, format!("{which} eye has non-finite coordinates")));
    }
    Ok(EyeLandmarks::new(points))
}

pub fn parse_frame_line(line: &str) -> Result<FrameSample, ProtocolError> {
    let text = normalize_leading_dots(line.trim_end_matches(['\r', '\n']));
    let raw: RawFrame = serde_json::from_str(&text).map_err(ProtocolError::from_json)?;
    if raw.event.is_some() {
        return Err(ProtocolError::new(0, "event line where a frame was expected"));
    }
    let t = raw.t.ok_or_else(|| ProtocolError::new(0, "missing field `t`"))?;
    if !t.is_finite() {
        return Err(ProtocolError::new(0, "non-finite timestamp"));
    }
    if raw.face == Some(false) {
        return Ok(FrameSample::tracking_lost(t));
    }
    let ear_override = raw
        .ear
        .map(|v| Ratio::new(v).map_err(|e| ProtocolError::new(0, e.to_string())))
        .transpose()?;
    Ok(FrameSample {
        timestamp_s: t,
        left: raw.left.map(|p| eye_from_raw(p, "left")).transpose()?,
        right: raw.right.map(|p| eye_from_raw(p, "right")).transpose()?,
        ear_override,
    })
}

fn write_eye(out: &mut String, key: &str, eye: &EyeLandmarks) {
    let _ = write!(out, ",\"{key}\":[");
    for (i, p) in eye.points.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "[{},{}]", p.x, p.y);
    }
    out.push(']');
}

pub fn serialize_frame(frame: &FrameSample) -> String {
    let mut out = format!("{{\"t\":{}", format_number(frame.timestamp_s));
    if let Some(ear) = frame.ear_override {
        let _ = write!(out, ",\"ear\":{}", ear.value());
    }
    if let Some(eye) = &frame.left {
        write_eye(&mut out, "left", eye);
    }
    if let Some(eye) = &frame.right {
        write_eye(&mut out, "right", eye);
    }
    out.push('}');
    out
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

pub fn serialize_event(event: &EventMessage) -> String {
    match event {
        EventMessage::Blink(b) => format!(
            "{{\"event\":\"blink\",\"start\":{},\"end\":{},\"duration\":{},\"t\":{}}}",
            format_number(b.start_s),
            format_number(b.end_s),
            format_number(b.duration_s),
            format_number(b.end_s),
        ),
        EventMessage::Decoder(DecoderEvent { kind, at_s }) => {
            let t = format_number(*at_s);
            match kind {
                DecoderEventKind::SymbolAppended(s) => {
                    format!("{{\"event\":\"symbol\",\"symbol\":\"{}\",\"t\":{t}}}", s.name())
                }
                DecoderEventKind::BlinkIgnored { duration_s } => format!(
                    "{{\"event\":\"ignored\",\"duration\":{},\"t\":{t}}}",
                    format_number(*duration_s)
                ),
                DecoderEventKind::LetterCommitted { ch, code } => format!(
                    "{{\"event\":\"letter\",\"char\":{},\"code\":\"{code}\",\"t\":{t}}}",
                    json_string(&ch.to_string())
                ),
                DecoderEventKind::InvalidSequence(code) => {
                    format!("{{\"event\":\"invalid\",\"code\":\"{code}\",\"t\":{t}}}")
                }
                DecoderEventKind::WordBreak => format!("{{\"event\":\"word_break\",\"t\":{t}}}"),
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
enum RawEvent {
    Symbol {
        symbol: String,
        t: f64,
    },
    Ignored {
        duration: f64,
        t: f64,
    },
    Letter {
        #[serde(rename = "char")]
        ch: char,
        code: String,
        t: f64,
    },
    Invalid {
        code: String,
        t: f64,
    },
    WordBreak {
        t: f64,
    },
    Blink {
        start: f64,
        end: f64,
        duration: f64,
    },
}

fn parse_code(code: &str) -> Result<MorseSequence, ProtocolError> {
    code.parse()
        .map_err(|e: crate::codec::CodecError| ProtocolError::new(0, e.to_string()))
}

pub fn parse_event_line(line: &str) -> Result<EventMessage, ProtocolError> {
    let raw: RawEvent = serde_json::from_str(line.trim_end_matches(['\r', '\n'])).map_err(ProtocolError::from_json)?;
    let decoder = |kind, t| Ok(EventMessage::Decoder(DecoderEvent::new(kind, t)));
    match raw {
        RawEvent::Symbol { symbol, t } => {
            let s = match symbol.as_str() {
                "dot" => MorseSymbol::Dot,
                "dash" => MorseSymbol::Dash,
                other => return Err(ProtocolError::new(0, format!("unknown symbol {other:?}"))),
            };
            decoder(DecoderEventKind::SymbolAppended(s), t)
        }
        RawEvent::Ignored { duration, t } => decoder(DecoderEventKind::BlinkIgnored { duration_s: duration }, t),
        RawEvent::Letter { ch, code, t } => {
            if !(ch.is_ascii_uppercase() || ch.is_ascii_digit() || ch == INVALID_CHAR) {
                return Err(ProtocolError::new(0, format!("unsupported letter {ch:?}")));
            }
            decoder(
                DecoderEventKind::LetterCommitted {
                    ch,
                    code: parse_code(&code)?,
                },
                t,
            )
        }
        RawEvent::Invalid { code, t } => decoder(DecoderEventKind::InvalidSequence(parse_code(&code)?), t),
        RawEvent::WordBreak { t } => decoder(DecoderEventKind::WordBreak, t),
        RawEvent::Blink { start, end, duration } => {
            if end <= start {
                return Err(ProtocolError::new(0, "blink must end after it starts"));
            }
            Ok(EventMessage::Blink(BlinkEvent {
                start_s: start,
                end_s: end,
                duration_s: duration,
            }))
        }
    }
}
